#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "gcm/measure.hpp"
#include "gcm/robustness.hpp"

namespace gcm::cli {

enum class Format { Json, Csv, Markdown };

std::optional<Format> parse_format(std::string_view text);

/// English short name for EU-28 geo codes (EL = Greece, UK = United
/// Kingdom); any other code is returned unchanged.
std::string country_name(const std::string& geo);

/// Context printed alongside results; `year` 0 means unknown.
struct ReportMeta {
  std::string name;
  int year = 0;
};

// JSON carries every double at full precision; csv and md round to 6
// significant digits. All three end with a newline.
std::string render_analysis(const AnalysisResult& result, const ReportMeta& meta, Format format);
std::string render_leave_one_out(const SensitivityReport& report, const ReportMeta& meta, Format format);
std::string render_perturbation(const PerturbationTable& table, const ReportMeta& meta, Format format);

/// Horizontal bar chart of w (descending), one <rect class="bar ..."> per
/// unit coloured by group, with vertical lines at w-bar + S, w-bar, w-bar - S.
std::string render_chart_svg(const AnalysisResult& result, const ReportMeta& meta);

}  // namespace gcm::cli
