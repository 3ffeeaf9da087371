#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gcm/measure.hpp"

namespace gcm {

struct SensitivityVariant {
  std::string label;
  std::string omitted;  ///< indicator code removed for this variant
  AnalysisResult result;
  double rank_correlation = 0.0;
  std::size_t group_changes = 0;

  friend bool operator==(const SensitivityVariant&, const SensitivityVariant&) = default;
};

struct SensitivityReport {
  AnalysisResult baseline;
  std::vector<SensitivityVariant> variants;

  friend bool operator==(const SensitivityReport&, const SensitivityReport&) = default;
};

/// Spearman's rho over the units common to both rankings, each re-ranked
/// 1..k within the common subset. Throws DegenerateInput when fewer than two
/// units are shared or a list repeats an identifier.
double rank_correlation(std::span<const std::string> ranks_a, std::span<const std::string> ranks_b);

/// Units present in both results whose group differs.
std::size_t group_changes(const Classification& a, const Classification& b);

/// Re-runs the pipeline once per indicator with that column removed.
SensitivityReport leave_one_out(const ObservationMatrix& matrix, const PipelineSettings& settings = {});

struct PerturbationOptions {
  double relative_noise = 0.01;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  /// Trials run concurrently on this many threads; output is identical for any value.
  unsigned threads = 1;
};

struct PerturbationRow {
  std::string unit;
  Group baseline;
  std::array<std::size_t, 4> counts{};  ///< trials landing in I, II, III, IV

  std::size_t total() const noexcept { return counts[0] + counts[1] + counts[2] + counts[3]; }
  friend bool operator==(const PerturbationRow&, const PerturbationRow&) = default;
};

struct PerturbationTable {
  double relative_noise = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t failed_trials = 0;
  /// In baseline rank order.
  std::vector<PerturbationRow> rows;

  friend bool operator==(const PerturbationTable&, const PerturbationTable&) = default;
};

/// Multiplies every present cell by (1 + u), u = cell_noise(noise, seed, trial,
/// row, column), re-runs the pipeline per trial and tallies each unit's group.
/// Trials whose pipeline throws a ComputeError are counted in failed_trials
/// and contribute no tallies. Throws std::invalid_argument for noise <= 0 or
/// zero trials.
PerturbationTable perturb(const ObservationMatrix& matrix, const PerturbationOptions& options,
                          const PipelineSettings& settings = {});

}  // namespace gcm
