#include "gcm/measure.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "gcm/detail/parallel.hpp"
#include "gcm/error.hpp"

namespace gcm {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<double> complete_column(const ObservationMatrix& m, std::size_t j) {
  std::vector<double> col;
  col.reserve(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto& cell = m.values.at(i).at(j);
    if (!cell)
      throw MissingData("missing value at (" + m.units[i] + ", " + m.indicators[j].code + ")");
    col.push_back(*cell);
  }
  return col;
}

// Sums run in ascending order so that mean and std_dev are invariant under
// permutation of their input.
std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  return v;
}

double sorted_mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return std::clamp(sum / static_cast<double>(v.size()), v.front(), v.back());
}

template <typename Fn>
auto staged(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (ComputeError& e) {
    if (e.stage().empty()) e.set_stage(stage);
    throw;
  }
}

}  // namespace

std::string_view to_string(TiePolicy p) {
  return p == TiePolicy::HigherGroup ? "higher_group" : "lower_group";
}

std::optional<TiePolicy> parse_tie_policy(std::string_view text) {
  const auto t = lower(text);
  if (t == "higher_group") return TiePolicy::HigherGroup;
  if (t == "lower_group") return TiePolicy::LowerGroup;
  return std::nullopt;
}

std::string_view to_string(ConstantColumnPolicy p) {
  return p == ConstantColumnPolicy::Error ? "error" : "drop_indicator";
}

std::optional<ConstantColumnPolicy> parse_constant_column_policy(std::string_view text) {
  const auto t = lower(text);
  if (t == "error") return ConstantColumnPolicy::Error;
  if (t == "drop_indicator") return ConstantColumnPolicy::DropIndicator;
  return std::nullopt;
}

std::vector<std::string> AnalysisResult::ranking() const {
  std::vector<std::string> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.push_back(s.unit);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> normalize_column(std::span<const double> values, Direction direction) {
  if (values.size() < 2)
    throw DegenerateInput("normalization needs at least 2 values, got " + std::to_string(values.size()));
  if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); }))
    throw DegenerateInput("normalization input contains a non-finite value");

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (lo == hi) throw ConstantColumn("", "column is constant (max = min), range is zero");

  const double range = hi - lo;
  std::vector<double> out;
  out.reserve(values.size());
  for (double x : values)
    out.push_back(direction == Direction::Stimulant ? (x - lo) / range : (hi - x) / range);
  return out;
}

NormalizedMatrix normalize_matrix(const ObservationMatrix& m) {
  NormalizedMatrix out;
  out.units = m.units;
  out.indicators = m.indicators;
  out.values.assign(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const auto col = complete_column(m, j);
    std::vector<double> z;
    try {
      z = normalize_column(col, m.indicators[j].direction);
    } catch (const ConstantColumn&) {
      throw ConstantColumn(m.indicators[j].code, "indicator " + m.indicators[j].code +
                                                     " is constant (max = min); cannot normalize");
    }
    for (std::size_t i = 0; i < m.rows(); ++i) out.values[i][j] = z[i];
  }
  return out;
}

double median(std::span<const double> values) {
  if (values.empty()) throw DegenerateInput("median of an empty list");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t m = v.size();
  const std::size_t mid = m / 2;  // 0-based index of order statistic floor(m/2)+1
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (m % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw DegenerateInput("mean of an empty list");
  return sorted_mean(sorted_copy(values));
}

double std_dev(std::span<const double> values) {
  if (values.empty()) throw DegenerateInput("standard deviation of an empty list");
  const auto v = sorted_copy(values);
  const double mu = sorted_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

UnitScore unit_score(std::string unit, std::span<const double> row) {
  UnitScore s;
  s.unit = std::move(unit);
  s.median = median(row);
  s.std_dev = std_dev(row);
  s.w = s.median * (1.0 - s.std_dev);
  return s;
}

Classification classify(std::span<const UnitScore> scores, TiePolicy tie) {
  if (scores.size() < 2)
    throw DegenerateInput("classification needs at least 2 units, got " + std::to_string(scores.size()));
  std::vector<double> w;
  w.reserve(scores.size());
  for (const auto& s : scores) w.push_back(s.w);

  Classification c;
  c.mean_w = mean(w);
  c.sd_w = std_dev(w);
  const double upper = c.mean_w + c.sd_w;
  const double lower = c.mean_w - c.sd_w;

  for (const auto& s : scores) {
    Group g;
    if (s.w >= upper)
      g = Group::I;
    else if (s.w > c.mean_w)
      g = Group::II;
    else if (s.w == c.mean_w)
      g = tie == TiePolicy::HigherGroup ? Group::II : Group::III;
    else if (s.w >= lower)
      g = Group::III;
    else
      g = Group::IV;
    if (!c.assignments.emplace(s.unit, g).second)
      throw DegenerateInput("unit " + s.unit + " appears twice in the score list");
  }
  return c;
}

void sort_scores(std::vector<UnitScore>& scores) {
  std::sort(scores.begin(), scores.end(), [](const UnitScore& a, const UnitScore& b) {
    if (a.w != b.w) return a.w > b.w;
    return a.unit < b.unit;
  });
}

AnalysisResult run_pipeline(const ObservationMatrix& input, const PipelineSettings& settings) {
  staged("validate", [&] {
    const auto report = validate(input);
    for (const auto& f : report.findings) {
      switch (f.kind) {
        case FindingKind::MissingCell:
        case FindingKind::ConstantColumn:
          break;  // handled by the policies below
        case FindingKind::NonFiniteCell:
          throw DegenerateInput(f.message);
        default:
          throw DegenerateMatrix(f.message);
      }
    }
    return 0;
  });

  AnalysisResult result;
  result.year = input.year;

  ObservationMatrix complete = staged("missing", [&] { return apply_missing_policy(input, settings.missing); });
  {
    std::set<std::string> kept_units(complete.units.begin(), complete.units.end());
    for (const auto& u : input.units)
      if (!kept_units.count(u)) result.dropped_units.push_back({u, "missing value"});
    std::set<std::string> kept_codes;
    for (const auto& spec : complete.indicators) kept_codes.insert(spec.code);
    for (const auto& spec : input.indicators)
      if (!kept_codes.count(spec.code)) result.dropped_indicators.push_back({spec.code, "missing value"});
  }

  if (settings.constant_column == ConstantColumnPolicy::DropIndicator) {
    std::vector<std::size_t> rows(complete.rows()), cols;
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    for (std::size_t j = 0; j < complete.cols(); ++j) {
      const auto col = complete.present_column(j);
      const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
      if (*lo == *hi)
        result.dropped_indicators.push_back({complete.indicators[j].code, "constant column"});
      else
        cols.push_back(j);
    }
    if (cols.empty()) {
      DegenerateMatrix e("every indicator is constant; nothing left to normalize");
      e.set_stage("normalize");
      throw e;
    }
    if (cols.size() != complete.cols()) complete = complete.select(rows, cols);
  }

  result.normalized = staged("normalize", [&] { return normalize_matrix(complete); });
  result.indicator_count = result.normalized.cols();

  result.scores.resize(result.normalized.rows());
  staged("score", [&] {
    detail::parallel_for(result.normalized.rows(), settings.threads, [&](std::size_t i) {
      result.scores[i] = unit_score(result.normalized.units[i], result.normalized.values[i]);
    });
    return 0;
  });

  result.classification = staged("classify", [&] { return classify(result.scores, settings.tie); });
  sort_scores(result.scores);
  return result;
}

}  // namespace gcm
