#include "gcm/cli/app.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gcm/cli/config.hpp"
#include "gcm/cli/report.hpp"
#include "gcm/error.hpp"
#include "gcm/ingest.hpp"
#include "gcm/robustness.hpp"

namespace gcm::cli {

namespace {

struct Options {
  std::string config;
  std::string format;
  std::string output;
  std::string input;
  std::string chart;
  std::string mode = "loo";
  double noise = 0.01;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct Loaded {
  RunConfig config;
  bool from_file = false;
};

unsigned effective_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

Loaded load(const Options& opts, const Environment& env) {
  Loaded l;
  l.from_file = !opts.config.empty();
  l.config = l.from_file ? load_config(opts.config) : default_config();
  resolve_base_url(l.config, env.api_base_url);
  return l;
}

ObservationMatrix assemble(const RunConfig& cfg, const Environment& env, unsigned threads) {
  AssembleOptions options;
  options.transport = env.transport;
  options.threads = threads;
  return assemble_matrix(cfg.indicators, cfg.year, cfg.geos, cfg.source, options);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("failed writing " + path);
}

void emit(const Options& opts, std::ostream& out, const std::string& text) {
  if (opts.output.empty()) {
    out << text;
    out.flush();
  } else {
    write_file(opts.output, text);
  }
}

int cmd_fetch(const Options& opts, const Environment& env, std::ostream& out, std::ostream& err) {
  const auto [cfg, _] = load(opts, env);
  const auto matrix = assemble(cfg, env, effective_threads(opts.threads));
  emit(opts, out, serialize_fixture_csv(matrix));
  const auto summary = fmt::format("{} units x {} indicators ({}), {} missing cells\n", matrix.rows(),
                                   matrix.cols(), cfg.year, matrix.missing_count());
  // Keep stdout clean for the CSV when it is the destination.
  (opts.output.empty() ? err : out) << summary;
  return kExitOk;
}

int cmd_analyze(const Options& opts, const Environment& env, std::ostream& out) {
  const auto format = *parse_format(opts.format);
  const auto threads = effective_threads(opts.threads);
  const auto [cfg, from_file] = load(opts, env);

  ObservationMatrix matrix;
  ReportMeta meta;
  if (!opts.input.empty()) {
    const auto text = read_file(opts.input);
    matrix = from_file ? parse_fixture_csv(text, cfg.indicators, cfg.year) : parse_fixture_csv(text);
    if (from_file) meta = {cfg.name, cfg.year};
  } else {
    matrix = assemble(cfg, env, threads);
    meta = {cfg.name, cfg.year};
  }

  const auto result = run_pipeline(matrix, cfg.settings(threads));
  emit(opts, out, render_analysis(result, meta, format));
  if (!opts.chart.empty()) write_file(opts.chart, render_chart_svg(result, meta));
  return kExitOk;
}

int cmd_sensitivity(const Options& opts, const Environment& env, std::ostream& out) {
  const auto format = *parse_format(opts.format);
  const auto threads = effective_threads(opts.threads);
  const auto [cfg, _] = load(opts, env);
  const ReportMeta meta{cfg.name, cfg.year};
  const auto matrix = assemble(cfg, env, threads);

  if (opts.mode == "loo") {
    emit(opts, out, render_leave_one_out(leave_one_out(matrix, cfg.settings(threads)), meta, format));
  } else {
    PerturbationOptions p;
    p.relative_noise = opts.noise;
    p.trials = opts.trials;
    p.seed = opts.seed;
    p.threads = threads;
    // Pipelines inside trials stay serial; the trials themselves are spread over threads.
    emit(opts, out, render_perturbation(perturb(matrix, p, cfg.settings(1)), meta, format));
  }
  return kExitOk;
}

std::string kind_of(const std::exception& e) {
  if (dynamic_cast<const NetworkError*>(&e)) return "NetworkError";
  if (dynamic_cast<const UpstreamError*>(&e)) return "UpstreamError";
  if (dynamic_cast<const DecodeError*>(&e)) return "DecodeError";
  if (dynamic_cast<const FormatError*>(&e)) return "FormatError";
  if (dynamic_cast<const EmptySelection*>(&e)) return "EmptySelection";
  if (dynamic_cast<const MissingDataset*>(&e)) return "MissingDataset";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const ConstantColumn*>(&e)) return "ConstantColumn";
  if (dynamic_cast<const MissingData*>(&e)) return "MissingData";
  if (dynamic_cast<const DegenerateMatrix*>(&e)) return "DegenerateMatrix";
  if (dynamic_cast<const DegenerateInput*>(&e)) return "DegenerateInput";
  return "error";
}

void add_common(CLI::App& sub, Options& o, bool csv_only) {
  sub.add_option("--config", o.config, "Run configuration (JSON); built-in EU-28/2019 default when omitted");
  auto* fmt_opt = sub.add_option("--format", o.format, "Report format");
  if (csv_only) {
    fmt_opt->check(CLI::IsMember({"csv"}))->default_str("csv");
  } else {
    fmt_opt->check(CLI::IsMember({"json", "csv", "md"}))->default_str("json");
  }
  sub.add_option("--output", o.output, "Write the report here instead of standard output");
  sub.add_option("--threads", o.threads, "Worker threads; 0 uses every core")->default_str("0");
}

}  // namespace

Environment environment_from_process() {
  Environment env;
  if (const char* v = std::getenv(kBaseUrlEnv)) env.api_base_url = v;
  return env;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env) {
  Options opts;
  CLI::App app{"Composite development measure from multi-indicator country data", "gcm"};
  app.require_subcommand(1);
  app.footer(fmt::format("Exit codes: 0 ok, 1 usage/config, 2 ingestion, 3 computation.\n"
                         "{} overrides the statistics API base URL (error if the config also sets one).",
                         kBaseUrlEnv));

  auto* fetch = app.add_subcommand("fetch", "Assemble the configured data and write it as fixture CSV");
  add_common(*fetch, opts, true);

  auto* analyze = app.add_subcommand("analyze", "Score and classify every unit");
  add_common(*analyze, opts, false);
  analyze->add_option("--input", opts.input, "Fixture CSV to analyse instead of the configured source");
  analyze->add_option("--chart", opts.chart, "Also write an SVG bar chart here");

  auto* sensitivity = app.add_subcommand("sensitivity", "Leave-one-out or perturbation robustness report");
  add_common(*sensitivity, opts, false);
  sensitivity->add_option("--mode", opts.mode, "loo or perturb")
      ->check(CLI::IsMember({"loo", "perturb"}))
      ->default_str("loo");
  auto* noise = sensitivity->add_option("--noise", opts.noise, "Relative noise amplitude (perturb)")
                    ->check(CLI::PositiveNumber)
                    ->default_str("0.01");
  auto* trials = sensitivity->add_option("--trials", opts.trials, "Number of trials (perturb)")
                     ->check(CLI::Range(std::size_t{1}, std::size_t{10'000'000}))
                     ->default_str("100");
  auto* seed = sensitivity->add_option("--seed", opts.seed, "Noise seed (perturb)")->default_str("1");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (opts.format.empty()) opts.format = fetch->parsed() ? "csv" : "json";
    if (sensitivity->parsed() && opts.mode == "loo" && (noise->count() || trials->count() || seed->count())) {
      throw CLI::ValidationError("--noise, --trials and --seed apply only to --mode perturb");
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    CLI::App* active = &app;
    for (auto* sub : {fetch, analyze, sensitivity}) {
      if (sub->parsed()) active = sub;
    }
    err << "error: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  }

  try {
    if (fetch->parsed()) return cmd_fetch(opts, env, out, err);
    if (analyze->parsed()) return cmd_analyze(opts, env, out);
    return cmd_sensitivity(opts, env, out);
  } catch (const ConfigError& e) {
    err << "error: " << kind_of(e) << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const IngestError& e) {
    err << "error: " << kind_of(e) << ": " << e.what() << "\n";
    return kExitIngest;
  } catch (const ComputeError& e) {
    err << "error: " << kind_of(e) << ": " << e.what() << "\n";
    return kExitCompute;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return kExitCompute;
  }
}

}  // namespace gcm::cli
