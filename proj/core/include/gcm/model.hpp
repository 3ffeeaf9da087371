#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gcm {

enum class Direction { Stimulant, Destimulant };

std::string_view to_string(Direction d);
/// Accepts "stimulant" / "destimulant" (also "de-stimulant"), case-insensitive.
std::optional<Direction> parse_direction(std::string_view text);

/// One diagnostic variable x_j.
struct IndicatorSpec {
  std::string code;  ///< Eurostat online-table code, e.g. "tin00111"
  std::string label;
  int symbol_index = 0;  ///< the j in x_j, 1-based
  Direction direction = Direction::Stimulant;

  friend bool operator==(const IndicatorSpec&, const IndicatorSpec&) = default;
};

using Cell = std::optional<double>;

/// Raw unit-by-indicator data for one reference year.
///
/// Rows are units (geo codes), columns are indicators. The grid is stored as
/// nested rows so that malformed shapes can be represented and reported by
/// validate() instead of being rejected at construction.
struct ObservationMatrix {
  std::vector<std::string> units;
  std::vector<IndicatorSpec> indicators;
  std::vector<std::vector<Cell>> values;
  int year = 0;

  std::size_t rows() const noexcept { return units.size(); }
  std::size_t cols() const noexcept { return indicators.size(); }

  /// Number of missing cells; assumes a well-formed shape.
  std::size_t missing_count() const;
  /// Column j as present values only.
  std::vector<double> present_column(std::size_t j) const;

  /// Copy keeping the given row/column positions, in the order given.
  ObservationMatrix select(const std::vector<std::size_t>& row_idx,
                           const std::vector<std::size_t>& col_idx) const;
  ObservationMatrix without_column(std::size_t j) const;

  friend bool operator==(const ObservationMatrix&, const ObservationMatrix&) = default;
};

/// Zero-unitarized values, each in [0,1].
struct NormalizedMatrix {
  std::vector<std::string> units;
  std::vector<IndicatorSpec> indicators;
  std::vector<std::vector<double>> values;

  std::size_t rows() const noexcept { return units.size(); }
  std::size_t cols() const noexcept { return indicators.size(); }

  friend bool operator==(const NormalizedMatrix&, const NormalizedMatrix&) = default;
};

enum class MissingPolicy { Fail, DropUnit, DropIndicator, ImputeColumnMean };

std::string_view to_string(MissingPolicy p);
std::optional<MissingPolicy> parse_missing_policy(std::string_view text);

struct UnitScore {
  std::string unit;
  double median = 0.0;
  double std_dev = 0.0;
  double w = 0.0;

  friend bool operator==(const UnitScore&, const UnitScore&) = default;
};

enum class Group { I = 1, II = 2, III = 3, IV = 4 };

std::string_view to_string(Group g);
inline int group_index(Group g) { return static_cast<int>(g) - 1; }

struct Classification {
  double mean_w = 0.0;  ///< w-bar
  double sd_w = 0.0;    ///< S
  std::map<std::string, Group> assignments;

  Group group_of(const std::string& unit) const;
  std::vector<std::string> members(Group g) const;

  friend bool operator==(const Classification&, const Classification&) = default;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class FindingKind {
  TooFewUnits,
  TooFewIndicators,
  DuplicateUnit,
  DuplicateIndicator,
  EmptyIndicatorCode,
  DuplicateSymbolIndex,
  ShapeMismatch,
  MissingCell,
  NonFiniteCell,
  ConstantColumn,
};

std::string_view to_string(FindingKind k);

struct Finding {
  FindingKind kind;
  std::optional<std::size_t> row;
  std::optional<std::size_t> col;
  std::string unit;       ///< set when the finding concerns a row
  std::string indicator;  ///< set when the finding concerns a column
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool empty() const noexcept { return findings.empty(); }
  std::size_t count(FindingKind k) const;
};

/// Reports every problem that prevents analysis under MissingPolicy::Fail.
/// Never throws.
ValidationReport validate(const ObservationMatrix& matrix);

/// Returns a complete copy of `matrix` with missing cells handled per policy.
/// Throws MissingData (Fail, or an all-missing column under imputation) and
/// DegenerateMatrix (shape mismatch, or dropping leaves n < 2 / m < 1).
ObservationMatrix apply_missing_policy(const ObservationMatrix& matrix, MissingPolicy policy);

}  // namespace gcm
