#include "gcm/cli/report.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace gcm::cli {

namespace {

using ojson = nlohmann::ordered_json;

std::string human(double x) { return fmt::format("{:.6g}", x); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

ojson meta_json(const ReportMeta& meta) {
  ojson j;
  j["name"] = meta.name.empty() ? ojson(nullptr) : ojson(meta.name);
  j["year"] = meta.year == 0 ? ojson(nullptr) : ojson(meta.year);
  return j;
}

std::string title(const ReportMeta& meta) {
  std::string t = meta.name.empty() ? "analysis" : meta.name;
  if (meta.year != 0) t += fmt::format(" ({})", meta.year);
  return t;
}

ojson dropped_json(const std::vector<DroppedItem>& items) {
  auto arr = ojson::array();
  for (const auto& d : items) arr.push_back({{"id", d.id}, {"reason", d.reason}});
  return arr;
}

std::string group_name(Group g) { return std::string(to_string(g)); }

constexpr std::array<Group, 4> kGroups{Group::I, Group::II, Group::III, Group::IV};

}  // namespace

std::optional<Format> parse_format(std::string_view text) {
  if (text == "json") return Format::Json;
  if (text == "csv") return Format::Csv;
  if (text == "md") return Format::Markdown;
  return std::nullopt;
}

std::string country_name(const std::string& geo) {
  static const std::map<std::string, std::string> names{
      {"AT", "Austria"},     {"BE", "Belgium"},     {"BG", "Bulgaria"},       {"CY", "Cyprus"},
      {"CZ", "Czechia"},     {"DE", "Germany"},     {"DK", "Denmark"},        {"EE", "Estonia"},
      {"EL", "Greece"},      {"ES", "Spain"},       {"FI", "Finland"},        {"FR", "France"},
      {"HR", "Croatia"},     {"HU", "Hungary"},     {"IE", "Ireland"},        {"IT", "Italy"},
      {"LT", "Lithuania"},   {"LU", "Luxembourg"},  {"LV", "Latvia"},         {"MT", "Malta"},
      {"NL", "Netherlands"}, {"PL", "Poland"},      {"PT", "Portugal"},       {"RO", "Romania"},
      {"SE", "Sweden"},      {"SI", "Slovenia"},    {"SK", "Slovakia"},       {"UK", "United Kingdom"},
  };
  auto it = names.find(geo);
  return it == names.end() ? geo : it->second;
}

std::string render_analysis(const AnalysisResult& result, const ReportMeta& meta, Format format) {
  const auto& cls = result.classification;
  switch (format) {
    case Format::Json: {
      ojson j = meta_json(meta);
      j["indicator_count"] = result.indicator_count;
      j["mean_w"] = cls.mean_w;
      j["sd_w"] = cls.sd_w;
      j["thresholds"] = {{"upper", cls.mean_w + cls.sd_w}, {"mean", cls.mean_w}, {"lower", cls.mean_w - cls.sd_w}};
      auto units = ojson::array();
      std::size_t rank = 0;
      for (const auto& s : result.scores) {
        units.push_back({{"rank", ++rank},
                         {"geo", s.unit},
                         {"name", country_name(s.unit)},
                         {"median", s.median},
                         {"std_dev", s.std_dev},
                         {"w", s.w},
                         {"group", group_name(cls.group_of(s.unit))}});
      }
      j["units"] = std::move(units);
      j["dropped_units"] = dropped_json(result.dropped_units);
      j["dropped_indicators"] = dropped_json(result.dropped_indicators);
      return j.dump(2) + "\n";
    }
    case Format::Csv: {
      std::string out = "rank,geo,name,median,std_dev,w,group\n";
      std::size_t rank = 0;
      for (const auto& s : result.scores) {
        out += fmt::format("{},{},{},{},{},{},{}\n", ++rank, csv_field(s.unit), csv_field(country_name(s.unit)),
                           human(s.median), human(s.std_dev), human(s.w), group_name(cls.group_of(s.unit)));
      }
      return out;
    }
    case Format::Markdown: {
      std::string out = fmt::format("# {}\n\n", md_cell(title(meta)));
      out += "| Rank | Geo | Country | Me | S | w | Group |\n";
      out += "|---:|---|---|---:|---:|---:|:---:|\n";
      std::size_t rank = 0;
      for (const auto& s : result.scores) {
        out += fmt::format("| {} | {} | {} | {} | {} | {} | {} |\n", ++rank, md_cell(s.unit),
                           md_cell(country_name(s.unit)), human(s.median), human(s.std_dev), human(s.w),
                           group_name(cls.group_of(s.unit)));
      }
      out += fmt::format("\n{} indicators; mean(w) = {}, sd(w) = {}\n", result.indicator_count, human(cls.mean_w),
                         human(cls.sd_w));
      for (const auto& d : result.dropped_units) out += fmt::format("\nDropped unit {}: {}\n", d.id, d.reason);
      for (const auto& d : result.dropped_indicators)
        out += fmt::format("\nDropped indicator {}: {}\n", d.id, d.reason);
      return out;
    }
  }
  return {};
}

std::string render_leave_one_out(const SensitivityReport& report, const ReportMeta& meta, Format format) {
  switch (format) {
    case Format::Json: {
      ojson j = meta_json(meta);
      j["mode"] = "loo";
      const auto& base = report.baseline;
      j["baseline"] = {{"indicator_count", base.indicator_count},
                       {"mean_w", base.classification.mean_w},
                       {"sd_w", base.classification.sd_w},
                       {"ranking", base.ranking()}};
      auto variants = ojson::array();
      for (const auto& v : report.variants) {
        auto groups = ojson::object();
        for (const auto& s : v.result.scores) groups[s.unit] = group_name(v.result.classification.group_of(s.unit));
        variants.push_back({{"label", v.label},
                            {"omitted", v.omitted},
                            {"indicator_count", v.result.indicator_count},
                            {"rank_correlation", v.rank_correlation},
                            {"group_changes", v.group_changes},
                            {"mean_w", v.result.classification.mean_w},
                            {"sd_w", v.result.classification.sd_w},
                            {"ranking", v.result.ranking()},
                            {"groups", std::move(groups)}});
      }
      j["variants"] = std::move(variants);
      return j.dump(2) + "\n";
    }
    case Format::Csv: {
      std::string out = "omitted,label,indicator_count,rank_correlation,group_changes\n";
      for (const auto& v : report.variants) {
        out += fmt::format("{},{},{},{},{}\n", csv_field(v.omitted), csv_field(v.label), v.result.indicator_count,
                           human(v.rank_correlation), v.group_changes);
      }
      return out;
    }
    case Format::Markdown: {
      std::string out = fmt::format("# {}: leave-one-out\n\n", md_cell(title(meta)));
      out += "| Variant | Indicators | Spearman rho | Group changes |\n";
      out += "|---|---:|---:|---:|\n";
      for (const auto& v : report.variants) {
        out += fmt::format("| {} | {} | {} | {} |\n", md_cell(v.label), v.result.indicator_count,
                           human(v.rank_correlation), v.group_changes);
      }
      return out;
    }
  }
  return {};
}

std::string render_perturbation(const PerturbationTable& table, const ReportMeta& meta, Format format) {
  const std::size_t valid = table.trials - table.failed_trials;
  auto share = [&](const PerturbationRow& r) -> std::optional<double> {
    if (valid == 0) return std::nullopt;
    return static_cast<double>(r.counts[group_index(r.baseline)]) / static_cast<double>(valid);
  };
  switch (format) {
    case Format::Json: {
      ojson j = meta_json(meta);
      j["mode"] = "perturb";
      j["relative_noise"] = table.relative_noise;
      j["trials"] = table.trials;
      j["seed"] = table.seed;
      j["failed_trials"] = table.failed_trials;
      auto units = ojson::array();
      for (const auto& r : table.rows) {
        auto counts = ojson::object();
        for (auto g : kGroups) counts[group_name(g)] = r.counts[group_index(g)];
        const auto s = share(r);
        units.push_back({{"geo", r.unit},
                         {"name", country_name(r.unit)},
                         {"baseline_group", group_name(r.baseline)},
                         {"counts", std::move(counts)},
                         {"baseline_share", s ? ojson(*s) : ojson(nullptr)}});
      }
      j["units"] = std::move(units);
      return j.dump(2) + "\n";
    }
    case Format::Csv: {
      std::string out = "geo,name,baseline_group,I,II,III,IV,baseline_share\n";
      for (const auto& r : table.rows) {
        const auto s = share(r);
        out += fmt::format("{},{},{},{},{},{},{},{}\n", csv_field(r.unit), csv_field(country_name(r.unit)),
                           group_name(r.baseline), r.counts[0], r.counts[1], r.counts[2], r.counts[3],
                           s ? human(*s) : "");
      }
      return out;
    }
    case Format::Markdown: {
      std::string out = fmt::format("# {}: perturbation\n\n", md_cell(title(meta)));
      out += fmt::format("relative noise {}, {} trials, seed {}, {} failed\n\n", human(table.relative_noise),
                         table.trials, table.seed, table.failed_trials);
      out += "| Geo | Country | Baseline | I | II | III | IV | Stable share |\n";
      out += "|---|---|:---:|---:|---:|---:|---:|---:|\n";
      for (const auto& r : table.rows) {
        const auto s = share(r);
        out += fmt::format("| {} | {} | {} | {} | {} | {} | {} | {} |\n", md_cell(r.unit),
                           md_cell(country_name(r.unit)), group_name(r.baseline), r.counts[0], r.counts[1],
                           r.counts[2], r.counts[3], s ? human(*s) : "n/a");
      }
      return out;
    }
  }
  return {};
}

std::string render_chart_svg(const AnalysisResult& result, const ReportMeta& meta) {
  constexpr double left = 170, plot = 500, right = 60, top = 84, row = 20, bar = 14, bottom = 64;
  static const std::map<Group, const char*> colour{
      {Group::I, "#1a9850"}, {Group::II, "#91cf60"}, {Group::III, "#fc8d59"}, {Group::IV, "#d73027"}};

  const auto n = result.scores.size();
  const double width = left + plot + right;
  const double height = top + row * static_cast<double>(n) + bottom;
  const double plot_bottom = top + row * static_cast<double>(n);
  auto x_of = [&](double w) { return left + plot * std::clamp(w, 0.0, 1.0); };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      width, height);
  out += fmt::format("  <title>{}</title>\n", xml_escape(title(meta)));
  out += fmt::format("  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", width, height);
  out += fmt::format("  <text x=\"{}\" y=\"24\" font-size=\"15\" font-weight=\"bold\">{}: w by unit</text>\n", left,
                     xml_escape(title(meta)));

  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    out += fmt::format(
        "  <line class=\"grid\" x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#dddddd\"/>\n"
        "  <text x=\"{0:.2f}\" y=\"{3}\" text-anchor=\"middle\">{4}</text>\n",
        x_of(t), top - 6, plot_bottom, plot_bottom + 16, t);
  }

  std::size_t i = 0;
  for (const auto& s : result.scores) {
    const auto g = result.classification.group_of(s.unit);
    const double y = top + row * static_cast<double>(i++);
    const auto label = fmt::format("{} ({})", country_name(s.unit), s.unit);
    out += fmt::format("  <text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", left - 6,
                       y + bar - 3, xml_escape(label));
    out += fmt::format(
        "  <rect class=\"bar group-{}\" data-geo=\"{}\" x=\"{}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{}\" "
        "fill=\"{}\"><title>{}: w = {}, group {}</title></rect>\n",
        group_name(g), xml_escape(s.unit), left, y + (row - bar) / 2, x_of(s.w) - left, bar, colour.at(g),
        xml_escape(s.unit), human(s.w), group_name(g));
  }

  const auto& cls = result.classification;
  const std::pair<double, const char*> thresholds[] = {
      {cls.mean_w + cls.sd_w, "mean + sd"}, {cls.mean_w, "mean"}, {cls.mean_w - cls.sd_w, "mean - sd"}};
  int k = 0;
  for (const auto& [value, name] : thresholds) {
    out += fmt::format(
        "  <line class=\"threshold\" x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#333333\" "
        "stroke-dasharray=\"4 3\"/>\n"
        "  <text x=\"{0:.2f}\" y=\"{3}\" text-anchor=\"middle\" font-size=\"10\">{4} = {5}</text>\n",
        x_of(value), top - 4, plot_bottom, top - 40 + 12 * k++, xml_escape(name), human(value));
  }

  double lx = left;
  for (auto g : kGroups) {
    out += fmt::format(
        "  <rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n"
        "  <text x=\"{:.2f}\" y=\"{:.2f}\">Group {}</text>\n",
        lx, plot_bottom + 30, colour.at(g), lx + 16, plot_bottom + 40, group_name(g));
    lx += 90;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace gcm::cli
