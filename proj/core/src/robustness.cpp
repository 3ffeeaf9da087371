#include "gcm/robustness.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

#include "gcm/detail/parallel.hpp"
#include "gcm/error.hpp"
#include "gcm/rng.hpp"

namespace gcm {

double rank_correlation(std::span<const std::string> a, std::span<const std::string> b) {
  const std::set<std::string> set_a(a.begin(), a.end());
  const std::set<std::string> set_b(b.begin(), b.end());
  if (set_a.size() != a.size() || set_b.size() != b.size())
    throw DegenerateInput("rank lists must not repeat identifiers");

  auto common_ranks = [&](std::span<const std::string> list, const std::set<std::string>& other) {
    std::map<std::string, double> rank;
    double r = 0.0;
    for (const auto& id : list)
      if (other.count(id)) rank[id] = ++r;
    return rank;
  };
  const auto ra = common_ranks(a, set_b);
  const auto rb = common_ranks(b, set_a);
  const auto k = static_cast<double>(ra.size());
  if (ra.size() < 2) throw DegenerateInput("rank correlation needs at least 2 common units");

  double d2 = 0.0;
  for (const auto& [id, rank] : ra) {
    const double d = rank - rb.at(id);
    d2 += d * d;
  }
  return 1.0 - 6.0 * d2 / (k * (k * k - 1.0));
}

std::size_t group_changes(const Classification& a, const Classification& b) {
  std::size_t n = 0;
  for (const auto& [unit, group] : a.assignments) {
    auto it = b.assignments.find(unit);
    if (it != b.assignments.end() && it->second != group) ++n;
  }
  return n;
}

SensitivityReport leave_one_out(const ObservationMatrix& matrix, const PipelineSettings& settings) {
  if (matrix.cols() < 2)
    throw DegenerateInput("leave-one-out needs at least 2 indicators, have " + std::to_string(matrix.cols()));

  SensitivityReport report;
  report.baseline = run_pipeline(matrix, settings);
  const auto base_rank = report.baseline.ranking();

  for (std::size_t j = 0; j < matrix.cols(); ++j) {
    SensitivityVariant v;
    v.omitted = matrix.indicators[j].code;
    v.label = "without " + v.omitted;
    v.result = run_pipeline(matrix.without_column(j), settings);
    const auto rank = v.result.ranking();
    v.rank_correlation = rank_correlation(base_rank, rank);
    v.group_changes = group_changes(report.baseline.classification, v.result.classification);
    report.variants.push_back(std::move(v));
  }
  return report;
}

PerturbationTable perturb(const ObservationMatrix& matrix, const PerturbationOptions& options,
                          const PipelineSettings& settings) {
  if (!(options.relative_noise > 0.0) || !std::isfinite(options.relative_noise))
    throw std::invalid_argument("relative noise must be a positive finite number");
  if (options.trials == 0) throw std::invalid_argument("at least one trial is required");

  const AnalysisResult baseline = run_pipeline(matrix, settings);

  PerturbationTable table;
  table.relative_noise = options.relative_noise;
  table.trials = options.trials;
  table.seed = options.seed;
  std::map<std::string, std::size_t> row_of;
  for (const auto& s : baseline.scores) {
    row_of[s.unit] = table.rows.size();
    table.rows.push_back({s.unit, baseline.classification.group_of(s.unit), {}});
  }

  // Per-trial outcomes are stored by index and tallied afterwards, so the
  // table is independent of scheduling.
  PipelineSettings trial_settings = settings;
  trial_settings.threads = 1;
  std::vector<std::optional<Classification>> outcomes(options.trials);
  detail::parallel_for(options.trials, options.threads, [&](std::size_t t) {
    ObservationMatrix noisy = matrix;
    for (std::size_t i = 0; i < noisy.values.size(); ++i)
      for (std::size_t j = 0; j < noisy.values[i].size(); ++j)
        if (auto& cell = noisy.values[i][j])
          *cell *= 1.0 + cell_noise(options.relative_noise, options.seed, t, i, j);
    try {
      outcomes[t] = run_pipeline(noisy, trial_settings).classification;
    } catch (const ComputeError&) {
      outcomes[t].reset();
    }
  });

  for (const auto& outcome : outcomes) {
    if (!outcome) {
      ++table.failed_trials;
      continue;
    }
    for (const auto& [unit, group] : outcome->assignments)
      if (auto it = row_of.find(unit); it != row_of.end()) ++table.rows[it->second].counts[group_index(group)];
  }
  return table;
}

}  // namespace gcm
