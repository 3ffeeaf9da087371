#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gcm/cli/app.hpp"
#include "gcm/cli/config.hpp"
#include "gcm/cli/report.hpp"
#include "gcm/error.hpp"
#include "gcm/ingest.hpp"
#include "fixture_api.hpp"
#include "golden.hpp"
#include "stub_transport.hpp"

using namespace gcm;
using namespace gcm::cli;
using nlohmann::json;

namespace {

const std::filesystem::path kData = GCM_DATA_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args, const Environment& env = {}) {
  std::ostringstream out, err;
  const int code = run(args, out, err, env);
  return {code, out.str(), err.str()};
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::map<std::string, std::string> fixture_bodies() { return fixture_api::bodies(kData); }

std::filesystem::path api_config(const stub::TempDir& dir, const std::string& base_url = "") {
  return fixture_api::write_api_config(kData, dir, base_url);
}

std::string fixture_config() { return (kData / "eu28_2019_fixture.json").string(); }

class LocalApi {
 public:
  LocalApi() {
    const auto bodies = fixture_bodies();
    server_.Get(R"(/api/(\w+))", [bodies](const httplib::Request& req, httplib::Response& res) {
      auto it = bodies.find(req.matches[1]);
      if (it == bodies.end()) {
        res.status = 404;
        return;
      }
      res.set_content(it->second, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalApi() {
    server_.stop();
    thread_.join();
  }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/api"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Config

TEST(Config, ShippedFileMatchesBuiltInDefault) {
  auto shipped = load_config(kData / "eu28_2019.json");
  const auto builtin = default_config();
  EXPECT_EQ(shipped.name, builtin.name);
  EXPECT_EQ(shipped.year, 2019);
  EXPECT_EQ(shipped.geos, builtin.geos);
  EXPECT_EQ(shipped.geos.size(), 28u);
  EXPECT_EQ(shipped.indicators, builtin.indicators);
  EXPECT_EQ(shipped.indicators.size(), 7u);
  for (const auto& ind : shipped.indicators) EXPECT_EQ(ind.direction, Direction::Stimulant);
  EXPECT_EQ(shipped.missing_policy, builtin.missing_policy);
  EXPECT_EQ(shipped.tie_policy, builtin.tie_policy);
  EXPECT_EQ(shipped.constant_column_policy, builtin.constant_column_policy);
  const auto& a = std::get<EurostatApiSource>(shipped.source);
  const auto& b = std::get<EurostatApiSource>(builtin.source);
  EXPECT_EQ(a.base_url, b.base_url);
  EXPECT_EQ(a.cache_dir, kData / b.cache_dir);
}

TEST(Config, FixtureConfigResolvesRelativePath) {
  const auto c = load_config(kData / "eu28_2019_fixture.json");
  EXPECT_EQ(std::get<FixtureCsvSource>(c.source).path, kData / "eu28_2019.csv");
}

TEST(Config, ParsesAllSourceKinds) {
  const auto tsv = parse_config(R"({"year": 2020, "geos": ["FI"], "indicators": [{"code": "a", "direction": "destimulant"}],
    "missing_policy": "drop_unit", "tie_policy": "lower_group", "constant_column_policy": "drop_indicator",
    "source": {"type": "eurostat_tsv", "paths": {"a": "a.tsv"}, "dimensions": {"a": {"unit": "PC_ENT"}}}})",
                                "/base");
  EXPECT_EQ(tsv.indicators[0].direction, Direction::Destimulant);
  EXPECT_EQ(tsv.indicators[0].label, "a");
  EXPECT_EQ(tsv.missing_policy, MissingPolicy::DropUnit);
  EXPECT_EQ(tsv.tie_policy, TiePolicy::LowerGroup);
  EXPECT_EQ(tsv.constant_column_policy, ConstantColumnPolicy::DropIndicator);
  const auto& src = std::get<EurostatTsvSource>(tsv.source);
  EXPECT_EQ(src.paths.at("a"), std::filesystem::path("/base/a.tsv"));
  EXPECT_EQ(src.dimensions.at("a").at("unit"), "PC_ENT");
}

TEST(Config, RejectsMalformedConfigs) {
  const std::string good_tail = R"("indicators": [{"code": "a"}], "source": {"type": "fixture_csv", "path": "x.csv"})";
  for (const std::string& bad : std::vector<std::string>{
           std::string("not json"),
           R"({"year": 2019, "geos": ["FI"], )" + good_tail + R"(, "colour": "red"})",
           R"({"year": "2019", "geos": ["FI"], )" + good_tail + "}",
           R"({"year": 2019, "geos": [], )" + good_tail + "}",
           R"({"year": 2019, "geos": ["FI", "FI"], )" + good_tail + "}",
           R"({"year": 2019, "geos": ["FI"], "indicators": [{"code": "a"}, {"code": "a"}], "source": {"type": "fixture_csv", "path": "x"}})",
           R"({"year": 2019, "geos": ["FI"], "indicators": [{"code": "a", "direction": "up"}], "source": {"type": "fixture_csv", "path": "x"}})",
           R"({"year": 2019, "geos": ["FI"], )" + good_tail + R"(, "tie_policy": "coin_flip"})",
           R"({"year": 2019, "geos": ["FI"], "indicators": [{"code": "a"}], "source": {"type": "ftp"}})",
           R"({"year": 2019, "geos": ["FI"], "indicators": [{"code": "a"}], "source": {"type": "eurostat_api"}})",
       }) {
    EXPECT_THROW(parse_config(bad), ConfigError) << bad;
  }
}

TEST(Config, BaseUrlResolution) {
  auto with = [](std::string base) {
    auto c = default_config();
    std::get<EurostatApiSource>(c.source).base_url = std::move(base);
    return c;
  };
  auto url = [](const RunConfig& c) { return std::get<EurostatApiSource>(c.source).base_url; };

  auto neither = with("");
  resolve_base_url(neither, std::nullopt);
  EXPECT_EQ(url(neither), kDefaultApiBaseUrl);

  auto env_only = with("");
  resolve_base_url(env_only, "http://mirror/api");
  EXPECT_EQ(url(env_only), "http://mirror/api");

  auto config_only = with("http://config/api");
  resolve_base_url(config_only, std::nullopt);
  EXPECT_EQ(url(config_only), "http://config/api");

  auto both = with("http://config/api");
  EXPECT_THROW(resolve_base_url(both, "http://mirror/api"), ConfigError);
}

// ---------------------------------------------------------------------------
// fetch

TEST(CliFetch, StubbedApiProducesFullFixture) {
  stub::TempDir dir;
  LocalApi api;
  const auto out = dir / "out.csv";
  Environment env;
  env.api_base_url = api.base_url();
  const auto r = run_cli({"fetch", "--config", api_config(dir).string(), "--output", out.string()}, env);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("28 units x 7 indicators"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("0 missing cells"), std::string::npos) << r.out;
  const auto m = parse_fixture_csv(read_file(out));
  EXPECT_EQ(m.rows(), 28u);
  EXPECT_EQ(m.cols(), 7u);
  EXPECT_EQ(read_file(out), read_file(kData / "eu28_2019.csv"));
}

TEST(CliFetch, UnreachableApiWithColdCacheExitsTwo) {
  stub::TempDir dir;
  stub::OfflineTransport offline;
  Environment env;
  env.transport = &offline;
  const auto r = run_cli({"fetch", "--config", api_config(dir).string(), "--output", (dir / "o.csv").string()}, env);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("NetworkError"), std::string::npos) << r.err;
  EXPECT_FALSE(std::filesystem::exists(dir / "o.csv"));
}

TEST(CliFetch, WarmCacheNeedsNoNetwork) {
  stub::TempDir dir;
  const auto config = api_config(dir).string();
  {
    stub::RecordingTransport stubbed;
    for (const auto& [code, body] : fixture_bodies()) stubbed.respond(code, 200, body);
    Environment env;
    env.transport = &stubbed;
    ASSERT_EQ(run_cli({"fetch", "--config", config, "--output", (dir / "a.csv").string()}, env).code, 0);
    EXPECT_EQ(stubbed.calls(), 7);
  }
  stub::OfflineTransport offline;
  Environment env;
  env.transport = &offline;
  const auto fetched = run_cli({"fetch", "--config", config, "--output", (dir / "b.csv").string()}, env);
  ASSERT_EQ(fetched.code, 0) << fetched.err;
  EXPECT_EQ(read_file(dir / "a.csv"), read_file(dir / "b.csv"));
  const auto analyzed = run_cli({"analyze", "--config", config}, env);
  ASSERT_EQ(analyzed.code, 0) << analyzed.err;
  EXPECT_EQ(offline.calls(), 0);
  EXPECT_EQ(json::parse(analyzed.out).at("units").size(), 28u);
}

TEST(CliFetch, CsvGoesToStdoutAndSummaryToStderr) {
  const auto r = run_cli({"fetch", "--config", fixture_config()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, read_file(kData / "eu28_2019.csv"));
  EXPECT_NE(r.err.find("28 units x 7 indicators"), std::string::npos);
}

TEST(CliFetch, OnlyCsvFormat) { EXPECT_EQ(run_cli({"fetch", "--format", "json"}).code, 1); }

TEST(CliFetch, EnvAndConfigBaseUrlConflictIsUsageError) {
  stub::TempDir dir;
  Environment env;
  env.api_base_url = "http://127.0.0.1:1/api";
  const auto r = run_cli({"fetch", "--config", api_config(dir, "http://127.0.0.1:2/api").string()}, env);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(kBaseUrlEnv), std::string::npos) << r.err;
}

// ---------------------------------------------------------------------------
// analyze

TEST(CliAnalyze, HandExampleJson) {
  stub::TempDir dir;
  write(dir / "hand.csv", "geo,x1,x2\nA,2,10\nB,4,20\nC,10,40\n");
  const auto r = run_cli({"analyze", "--input", (dir / "hand.csv").string(), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  const auto& units = doc.at("units");
  ASSERT_EQ(units.size(), 3u);
  EXPECT_EQ(units[0].at("geo"), "C");
  EXPECT_NEAR(units[0].at("w").get<double>(), 1.0, 1e-6);
  EXPECT_EQ(units[1].at("geo"), "B");
  EXPECT_NEAR(units[1].at("w").get<double>(), 0.279514, 1e-6);
  EXPECT_NEAR(units[1].at("w").get<double>(), 0.2795138888888889, 1e-15);
  EXPECT_EQ(units[2].at("geo"), "A");
  EXPECT_EQ(units[2].at("w").get<double>(), 0.0);
  EXPECT_EQ(units[0].at("group"), "I");
  EXPECT_EQ(units[1].at("group"), "III");
  EXPECT_EQ(units[2].at("group"), "IV");
  EXPECT_TRUE(doc.at("year").is_null());
}

TEST(CliAnalyze, FrozenFixtureMatchesGolden) {
  const auto r = run_cli({"analyze", "--config", fixture_config(), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc.at("year"), 2019);
  EXPECT_NEAR(doc.at("mean_w").get<double>(), golden::kMeanW, golden::kTolerance);
  EXPECT_NEAR(doc.at("sd_w").get<double>(), golden::kSdW, golden::kTolerance);
  const auto& units = doc.at("units");
  ASSERT_EQ(units.size(), golden::kEu28Rows.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    const auto& g = golden::kEu28Rows[i];
    EXPECT_EQ(units[i].at("geo"), g.geo);
    EXPECT_EQ(units[i].at("rank"), i + 1);
    EXPECT_NEAR(units[i].at("median").get<double>(), g.median, golden::kTolerance) << g.geo;
    EXPECT_NEAR(units[i].at("std_dev").get<double>(), g.std_dev, golden::kTolerance) << g.geo;
    EXPECT_NEAR(units[i].at("w").get<double>(), g.w, golden::kTolerance) << g.geo;
    EXPECT_EQ(units[i].at("group"), std::string(to_string(g.group))) << g.geo;
  }
}

TEST(CliAnalyze, FormatsCarryTheSameNumbers) {
  const auto as_json = json::parse(run_cli({"analyze", "--config", fixture_config()}).out);
  const auto csv = run_cli({"analyze", "--config", fixture_config(), "--format", "csv"}).out;
  const auto md = run_cli({"analyze", "--config", fixture_config(), "--format", "md"}).out;

  std::istringstream csv_lines(csv);
  std::string line;
  std::getline(csv_lines, line);
  EXPECT_EQ(line, "rank,geo,name,median,std_dev,w,group");
  for (const auto& u : as_json.at("units")) {
    const auto six = [&](const char* key) { return fmt::format("{:.6g}", u.at(key).get<double>()); };
    std::getline(csv_lines, line);
    const auto expected = fmt::format("{},{},{},{},{},{},{}", u.at("rank").get<int>(), u.at("geo").get<std::string>(),
                                      u.at("name").get<std::string>(), six("median"), six("std_dev"), six("w"),
                                      u.at("group").get<std::string>());
    EXPECT_EQ(line, expected);
    const auto md_row = fmt::format("| {} | {} | {} | {} | {} | {} | {} |", u.at("rank").get<int>(),
                                    u.at("geo").get<std::string>(), u.at("name").get<std::string>(), six("median"),
                                    six("std_dev"), six("w"), u.at("group").get<std::string>());
    EXPECT_NE(md.find(md_row), std::string::npos) << md_row;
  }
}

TEST(CliAnalyze, MarkdownNamesCountries) {
  const auto md = run_cli({"analyze", "--config", fixture_config(), "--format", "md"}).out;
  EXPECT_NE(md.find("| Greece |"), std::string::npos);
  EXPECT_NE(md.find("| United Kingdom |"), std::string::npos);
  // Group IV rows of the frozen fixture.
  for (const char* name : {"Latvia", "Hungary", "Bulgaria", "Romania"}) {
    EXPECT_NE(md.find(fmt::format("| {} |", name)), std::string::npos);
  }
  std::size_t group_iv_rows = 0;
  for (std::size_t p = md.find("| IV |"); p != std::string::npos; p = md.find("| IV |", p + 1)) ++group_iv_rows;
  EXPECT_EQ(group_iv_rows, 4u);
}

TEST(CliAnalyze, ChartIsWellFormedWithOneBarPerUnit) {
  stub::TempDir dir;
  const auto svg = dir / "chart.svg";
  const auto r = run_cli({"analyze", "--config", fixture_config(), "--chart", svg.string(), "--output",
                          (dir / "r.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());

  boost::property_tree::ptree tree;
  std::ifstream in(svg);
  ASSERT_NO_THROW(boost::property_tree::read_xml(in, tree));
  std::size_t bars = 0, thresholds = 0;
  std::set<std::string> geos;
  for (const auto& [tag, node] : tree.get_child("svg")) {
    const auto cls = node.get("<xmlattr>.class", std::string());
    if (tag == "rect" && cls.rfind("bar ", 0) == 0) {
      ++bars;
      geos.insert(node.get<std::string>("<xmlattr>.data-geo"));
    }
    if (tag == "line" && cls == "threshold") ++thresholds;
  }
  EXPECT_EQ(bars, 28u);
  EXPECT_EQ(geos.size(), 28u);
  EXPECT_EQ(thresholds, 3u);
}

TEST(CliAnalyze, ChartEscapesText) {
  AnalysisResult r = run_pipeline(parse_fixture_csv("geo,a,b\nA&B,1,2\n<C>,3,1\nD,2,3\n"));
  const auto svg = render_chart_svg(r, {"x \"&\" y", 2019});
  boost::property_tree::ptree tree;
  std::istringstream in(svg);
  EXPECT_NO_THROW(boost::property_tree::read_xml(in, tree));
}

TEST(CliAnalyze, UnknownFormatIsUsageError) {
  const auto r = run_cli({"analyze", "--input", "whatever.csv", "--format", "xml"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("Usage:"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(CliAnalyze, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"plot"}).code, 1);
  EXPECT_EQ(run_cli({"analyze", "--bogus"}).code, 1);
  EXPECT_EQ(run_cli({"analyze", "--config", "/nonexistent/config.json"}).code, 1);
  EXPECT_EQ(run_cli({"analyze", "--help"}).code, 0);
}

TEST(CliAnalyze, IngestionErrorsExitTwo) {
  stub::TempDir dir;
  EXPECT_EQ(run_cli({"analyze", "--input", (dir / "missing.csv").string()}).code, 2);
  write(dir / "ragged.csv", "geo,a,b\nFI,52\n");
  const auto r = run_cli({"analyze", "--input", (dir / "ragged.csv").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("FormatError"), std::string::npos);
  // strict lookup against the configured indicators
  write(dir / "other.csv", "geo,zzz\nFI,1\nSE,2\n");
  EXPECT_EQ(run_cli({"analyze", "--config", fixture_config(), "--input", (dir / "other.csv").string()}).code, 2);
}

TEST(CliAnalyze, ComputationErrorsExitThree) {
  stub::TempDir dir;
  write(dir / "flat.csv", "geo,a,b\nFI,1,5\nSE,2,5\nDK,3,5\n");
  const auto r = run_cli({"analyze", "--input", (dir / "flat.csv").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("ConstantColumn"), std::string::npos) << r.err;
  write(dir / "gap.csv", "geo,a,b\nFI,1,5\nSE,,6\nDK,3,7\n");
  EXPECT_EQ(run_cli({"analyze", "--input", (dir / "gap.csv").string()}).code, 3);
}

// ---------------------------------------------------------------------------
// sensitivity

TEST(CliSensitivity, LeaveOneOutListsSevenVariants) {
  const auto r = run_cli({"sensitivity", "--config", fixture_config(), "--mode", "loo"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  ASSERT_EQ(doc.at("variants").size(), 7u);
  for (const auto& v : doc.at("variants")) {
    EXPECT_EQ(v.at("indicator_count"), 6);
    EXPECT_EQ(v.at("ranking").size(), 28u);
    EXPECT_LE(v.at("rank_correlation").get<double>(), 1.0);
  }
  const auto md = run_cli({"sensitivity", "--config", fixture_config(), "--format", "md"}).out;
  EXPECT_NE(md.find("| without tin00116 |"), std::string::npos);
}

TEST(CliSensitivity, PerturbIsByteIdenticalAcrossRunsAndThreads) {
  const std::vector<std::string> base{"sensitivity", "--config", fixture_config(), "--mode", "perturb",
                                      "--seed", "1", "--trials", "64", "--noise", "0.05"};
  auto with_threads = [&](const char* n) {
    auto args = base;
    args.insert(args.end(), {"--threads", n});
    return run_cli(args);
  };
  const auto a = with_threads("1");
  const auto b = with_threads("1");
  const auto c = with_threads("8");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  const auto doc = json::parse(a.out);
  EXPECT_EQ(doc.at("seed"), 1);
  EXPECT_EQ(doc.at("units").size(), 28u);
}

TEST(CliSensitivity, VanishingNoiseKeepsEveryUnitInPlace) {
  const auto r = run_cli({"sensitivity", "--config", fixture_config(), "--mode", "perturb", "--noise", "1e-15",
                          "--trials", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc.at("failed_trials"), 0);
  for (const auto& u : doc.at("units")) {
    EXPECT_EQ(u.at("counts").at(u.at("baseline_group").get<std::string>()), 10) << u.at("geo");
    EXPECT_EQ(u.at("baseline_share"), 1.0);
  }
}

TEST(CliSensitivity, ArgumentValidation) {
  EXPECT_EQ(run_cli({"sensitivity", "--mode", "bootstrap"}).code, 1);
  EXPECT_EQ(run_cli({"sensitivity", "--mode", "perturb", "--noise", "0"}).code, 1);
  EXPECT_EQ(run_cli({"sensitivity", "--mode", "perturb", "--noise", "-1"}).code, 1);
  EXPECT_EQ(run_cli({"sensitivity", "--mode", "perturb", "--trials", "0"}).code, 1);
  EXPECT_EQ(run_cli({"sensitivity", "--mode", "loo", "--seed", "3"}).code, 1);
}
