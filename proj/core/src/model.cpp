#include "gcm/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "gcm/error.hpp"

namespace gcm {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool shape_ok(const ObservationMatrix& m) {
  if (m.values.size() != m.units.size()) return false;
  return std::all_of(m.values.begin(), m.values.end(),
                     [&](const auto& row) { return row.size() == m.indicators.size(); });
}

std::string coord(const ObservationMatrix& m, std::size_t i, std::size_t j) {
  return "(" + m.units[i] + ", " + m.indicators[j].code + ")";
}

}  // namespace

std::string_view to_string(Direction d) {
  return d == Direction::Stimulant ? "stimulant" : "destimulant";
}

std::optional<Direction> parse_direction(std::string_view text) {
  const auto t = lower(text);
  if (t == "stimulant") return Direction::Stimulant;
  if (t == "destimulant" || t == "de-stimulant") return Direction::Destimulant;
  return std::nullopt;
}

std::string_view to_string(MissingPolicy p) {
  switch (p) {
    case MissingPolicy::Fail: return "fail";
    case MissingPolicy::DropUnit: return "drop_unit";
    case MissingPolicy::DropIndicator: return "drop_indicator";
    case MissingPolicy::ImputeColumnMean: return "impute_column_mean";
  }
  return "fail";
}

std::optional<MissingPolicy> parse_missing_policy(std::string_view text) {
  const auto t = lower(text);
  for (auto p : {MissingPolicy::Fail, MissingPolicy::DropUnit, MissingPolicy::DropIndicator,
                 MissingPolicy::ImputeColumnMean}) {
    if (t == to_string(p)) return p;
  }
  return std::nullopt;
}

std::string_view to_string(Group g) {
  switch (g) {
    case Group::I: return "I";
    case Group::II: return "II";
    case Group::III: return "III";
    case Group::IV: return "IV";
  }
  return "?";
}

std::string_view to_string(FindingKind k) {
  switch (k) {
    case FindingKind::TooFewUnits: return "too few units";
    case FindingKind::TooFewIndicators: return "too few indicators";
    case FindingKind::DuplicateUnit: return "duplicate unit";
    case FindingKind::DuplicateIndicator: return "duplicate indicator";
    case FindingKind::EmptyIndicatorCode: return "empty indicator code";
    case FindingKind::DuplicateSymbolIndex: return "duplicate symbol index";
    case FindingKind::ShapeMismatch: return "shape mismatch";
    case FindingKind::MissingCell: return "missing cell";
    case FindingKind::NonFiniteCell: return "non-finite cell";
    case FindingKind::ConstantColumn: return "constant column";
  }
  return "?";
}

// ---------------------------------------------------------------------------

std::size_t ObservationMatrix::missing_count() const {
  std::size_t n = 0;
  for (const auto& row : values)
    n += static_cast<std::size_t>(std::count(row.begin(), row.end(), std::nullopt));
  return n;
}

std::vector<double> ObservationMatrix::present_column(std::size_t j) const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& row : values)
    if (j < row.size() && row[j]) out.push_back(*row[j]);
  return out;
}

ObservationMatrix ObservationMatrix::select(const std::vector<std::size_t>& row_idx,
                                            const std::vector<std::size_t>& col_idx) const {
  ObservationMatrix out;
  out.year = year;
  for (auto j : col_idx) out.indicators.push_back(indicators.at(j));
  for (auto i : row_idx) {
    out.units.push_back(units.at(i));
    std::vector<Cell> row;
    row.reserve(col_idx.size());
    for (auto j : col_idx) row.push_back(values.at(i).at(j));
    out.values.push_back(std::move(row));
  }
  return out;
}

ObservationMatrix ObservationMatrix::without_column(std::size_t j) const {
  std::vector<std::size_t> rows_all(rows()), cols_kept;
  for (std::size_t i = 0; i < rows(); ++i) rows_all[i] = i;
  for (std::size_t k = 0; k < cols(); ++k)
    if (k != j) cols_kept.push_back(k);
  return select(rows_all, cols_kept);
}

Group Classification::group_of(const std::string& unit) const {
  auto it = assignments.find(unit);
  if (it == assignments.end()) throw std::out_of_range("unit not classified: " + unit);
  return it->second;
}

std::vector<std::string> Classification::members(Group g) const {
  std::vector<std::string> out;
  for (const auto& [unit, group] : assignments)
    if (group == g) out.push_back(unit);
  return out;
}

std::size_t ValidationReport::count(FindingKind k) const {
  return static_cast<std::size_t>(std::count_if(
      findings.begin(), findings.end(), [k](const Finding& f) { return f.kind == k; }));
}

// ---------------------------------------------------------------------------

ValidationReport validate(const ObservationMatrix& m) {
  ValidationReport report;
  auto add = [&](Finding f) { report.findings.push_back(std::move(f)); };

  if (m.units.size() < 2)
    add({FindingKind::TooFewUnits, {}, {}, {}, {},
         "need at least 2 units, have " + std::to_string(m.units.size())});
  if (m.indicators.empty())
    add({FindingKind::TooFewIndicators, {}, {}, {}, {}, "need at least 1 indicator"});

  std::set<std::string> seen;
  for (std::size_t i = 0; i < m.units.size(); ++i)
    if (!seen.insert(m.units[i]).second)
      add({FindingKind::DuplicateUnit, i, {}, m.units[i], {}, "duplicate unit " + m.units[i]});

  seen.clear();
  std::set<int> symbols;
  for (std::size_t j = 0; j < m.indicators.size(); ++j) {
    const auto& spec = m.indicators[j];
    if (spec.code.empty())
      add({FindingKind::EmptyIndicatorCode, {}, j, {}, {}, "indicator " + std::to_string(j + 1) + " has no code"});
    else if (!seen.insert(spec.code).second)
      add({FindingKind::DuplicateIndicator, {}, j, {}, spec.code, "duplicate indicator " + spec.code});
    if (!symbols.insert(spec.symbol_index).second)
      add({FindingKind::DuplicateSymbolIndex, {}, j, {}, spec.code,
           "symbol index " + std::to_string(spec.symbol_index) + " used twice"});
  }

  if (!shape_ok(m)) {
    std::ostringstream msg;
    msg << "grid is not " << m.units.size() << "x" << m.indicators.size();
    add({FindingKind::ShapeMismatch, {}, {}, {}, {}, msg.str()});
    return report;
  }

  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const auto& cell = m.values[i][j];
      if (!cell)
        add({FindingKind::MissingCell, i, j, m.units[i], m.indicators[j].code,
             "missing value at " + coord(m, i, j)});
      else if (!std::isfinite(*cell))
        add({FindingKind::NonFiniteCell, i, j, m.units[i], m.indicators[j].code,
             "non-finite value at " + coord(m, i, j)});
    }
  }

  for (std::size_t j = 0; j < m.cols(); ++j) {
    const auto col = m.present_column(j);
    if (col.empty()) continue;
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    if (*lo == *hi)
      add({FindingKind::ConstantColumn, {}, j, {}, m.indicators[j].code,
           "constant column " + m.indicators[j].code});
  }
  return report;
}

ObservationMatrix apply_missing_policy(const ObservationMatrix& m, MissingPolicy policy) {
  if (!shape_ok(m)) throw DegenerateMatrix("grid dimensions do not match units x indicators");

  std::vector<std::pair<std::size_t, std::size_t>> missing;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!m.values[i][j]) missing.emplace_back(i, j);
  if (missing.empty()) return m;

  switch (policy) {
    case MissingPolicy::Fail: {
      std::string msg = std::to_string(missing.size()) + " missing cell(s):";
      for (auto [i, j] : missing) msg += " " + coord(m, i, j);
      throw MissingData(msg);
    }
    case MissingPolicy::DropUnit:
    case MissingPolicy::DropIndicator: {
      const bool by_row = policy == MissingPolicy::DropUnit;
      std::set<std::size_t> drop;
      for (auto [i, j] : missing) drop.insert(by_row ? i : j);
      std::vector<std::size_t> rows_kept, cols_kept;
      for (std::size_t i = 0; i < m.rows(); ++i)
        if (!by_row || !drop.count(i)) rows_kept.push_back(i);
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (by_row || !drop.count(j)) cols_kept.push_back(j);
      if (rows_kept.size() < 2)
        throw DegenerateMatrix("dropping incomplete units leaves " + std::to_string(rows_kept.size()) +
                               " unit(s); need at least 2");
      if (cols_kept.empty())
        throw DegenerateMatrix("dropping incomplete indicators leaves no indicator");
      return m.select(rows_kept, cols_kept);
    }
    case MissingPolicy::ImputeColumnMean: {
      ObservationMatrix out = m;
      for (std::size_t j = 0; j < m.cols(); ++j) {
        const auto col = m.present_column(j);
        if (col.size() == m.rows()) continue;
        if (col.empty())
          throw MissingData("cannot impute column " + m.indicators[j].code + ": every value is missing");
        double sum = 0.0;
        for (double v : col) sum += v;
        const double mean = sum / static_cast<double>(col.size());
        for (auto& row : out.values)
          if (!row[j]) row[j] = mean;
      }
      return out;
    }
  }
  return m;
}

}  // namespace gcm
