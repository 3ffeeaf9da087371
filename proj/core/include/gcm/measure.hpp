#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gcm/model.hpp"

namespace gcm {

/// Which group receives a unit whose w equals the mean exactly.
enum class TiePolicy { HigherGroup, LowerGroup };

/// What run_pipeline does with an indicator whose values are all equal.
enum class ConstantColumnPolicy { Error, DropIndicator };

std::string_view to_string(TiePolicy p);
std::optional<TiePolicy> parse_tie_policy(std::string_view text);
std::string_view to_string(ConstantColumnPolicy p);
std::optional<ConstantColumnPolicy> parse_constant_column_policy(std::string_view text);

struct PipelineSettings {
  MissingPolicy missing = MissingPolicy::Fail;
  TiePolicy tie = TiePolicy::HigherGroup;
  ConstantColumnPolicy constant_column = ConstantColumnPolicy::Error;
  /// Worker threads for per-unit scoring; results do not depend on it.
  unsigned threads = 1;
};

struct DroppedItem {
  std::string id;
  std::string reason;

  friend bool operator==(const DroppedItem&, const DroppedItem&) = default;
};

struct AnalysisResult {
  NormalizedMatrix normalized;
  /// Descending by w; equal w ordered by unit identifier ascending.
  std::vector<UnitScore> scores;
  Classification classification;
  int year = 0;
  std::size_t indicator_count = 0;
  std::vector<DroppedItem> dropped_units;
  std::vector<DroppedItem> dropped_indicators;

  /// Unit identifiers in rank order (rank 1 first).
  std::vector<std::string> ranking() const;

  friend bool operator==(const AnalysisResult&, const AnalysisResult&) = default;
};

// Zero unitarization of one column. Throws DegenerateInput for fewer than two
// values or non-finite input and ConstantColumn when max == min.
std::vector<double> normalize_column(std::span<const double> values, Direction direction);

/// Column-wise normalize_column over a complete matrix.
NormalizedMatrix normalize_matrix(const ObservationMatrix& matrix);

/// Middle order statistic (odd count) or mean of the two middle ones (even count).
double median(std::span<const double> values);

/// Population standard deviation (divisor m).
double std_dev(std::span<const double> values);

/// Arithmetic mean, clamped to [min, max] so that equal inputs give that value exactly.
double mean(std::span<const double> values);

/// Me, S_d and w = Me * (1 - S_d) for one unit's normalized row.
UnitScore unit_score(std::string unit, std::span<const double> row);

/// Groups I..IV from the mean and population standard deviation of w.
Classification classify(std::span<const UnitScore> scores, TiePolicy tie = TiePolicy::HigherGroup);

/// Sorts descending by w, ties by unit ascending.
void sort_scores(std::vector<UnitScore>& scores);

AnalysisResult run_pipeline(const ObservationMatrix& matrix, const PipelineSettings& settings = {});

}  // namespace gcm
