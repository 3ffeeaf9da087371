#include <algorithm>
#include <cctype>

#include "gcm/error.hpp"
#include "gcm/ingest.hpp"
#include "text.hpp"

namespace gcm {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<std::set<std::string>> parse_flags(std::string_view s) {
  std::set<std::string> flags;
  for (char c : s) {
    if (c == ' ' || c == '\t') continue;
    if (c < 'a' || c > 'z') return std::nullopt;
    flags.insert(std::string(1, c));
  }
  return flags;
}

}  // namespace

std::optional<std::pair<std::optional<double>, std::set<std::string>>> parse_eurostat_cell(std::string_view cell) {
  cell = text::trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == ':') {
    auto flags = parse_flags(cell.substr(1));
    if (!flags) return std::nullopt;
    return std::pair{std::optional<double>{}, std::move(*flags)};
  }
  const auto space = cell.find(' ');
  const auto number = cell.substr(0, space);
  const auto value = text::parse_double(number);
  if (!value) return std::nullopt;
  std::set<std::string> flags;
  if (space != std::string_view::npos) {
    auto parsed = parse_flags(cell.substr(space + 1));
    if (!parsed) return std::nullopt;
    flags = std::move(*parsed);
  }
  return std::pair{std::optional<double>{*value}, std::move(flags)};
}

std::vector<RawObservation> parse_eurostat_tsv(std::string_view input, const std::string& dataset_code,
                                               const TsvSelection& selection) {
  if (input.starts_with("\xEF\xBB\xBF")) input.remove_prefix(3);
  const auto lines = text::split_lines(input);
  std::size_t h = 0;
  while (h < lines.size() && text::trim(lines[h]).empty()) ++h;
  if (h == lines.size()) throw FormatError(1, 0, "empty input, expected a header line");

  // Header: "dim1,dim2,...,geo\time<TAB>2019<TAB>2018..."
  const auto header = text::split(lines[h], '\t');
  const std::size_t hl = h + 1;
  const auto dims_field = text::split(text::trim(header[0]), ',');
  std::vector<std::string> dims;
  for (auto d : dims_field) dims.emplace_back(text::trim(d));
  const auto last = lower(dims.back());
  if (last != "geo\\time" && last != "geo\\time_period")
    throw FormatError(hl, 1, "first header field must end in 'geo\\time', found '" + std::string(header[0]) + "'");
  dims.back() = "geo";
  if (header.size() < 2) throw FormatError(hl, 0, "header has no time columns");

  std::optional<std::size_t> year_col;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto label = text::trim(header[c]);
    const auto y = text::parse_int(label);
    if (!y) throw FormatError(hl, c + 1, "time label is not a year: '" + std::string(label) + "'");
    if (*y == selection.year && !year_col) year_col = c;
  }
  if (!year_col)
    throw EmptySelection(dataset_code + ": year " + std::to_string(selection.year) + " is not in the file");

  std::vector<std::pair<std::size_t, std::string>> required;
  for (const auto& [name, value] : selection.dimensions) {
    auto it = std::find(dims.begin(), dims.end(), name);
    if (it == dims.end())
      throw EmptySelection(dataset_code + ": file has no dimension '" + name + "'");
    required.emplace_back(static_cast<std::size_t>(it - dims.begin()), value);
  }

  std::vector<RawObservation> out;
  std::set<std::string> seen;
  for (std::size_t l = h + 1; l < lines.size(); ++l) {
    if (text::trim(lines[l]).empty()) continue;
    const std::size_t ln = l + 1;
    const auto fields = text::split(lines[l], '\t');
    if (fields.size() != header.size())
      throw FormatError(ln, 0, "expected " + std::to_string(header.size()) + " tab-separated fields, found " +
                                   std::to_string(fields.size()));
    const auto key = text::split(fields[0], ',');
    if (key.size() != dims.size())
      throw FormatError(ln, 1, "series key has " + std::to_string(key.size()) + " parts, header declares " +
                                   std::to_string(dims.size()));
    const bool wanted = std::all_of(required.begin(), required.end(),
                                    [&](const auto& r) { return text::trim(key[r.first]) == r.second; });
    if (!wanted) continue;
    const std::string geo(text::trim(key.back()));
    if (selection.geos && !selection.geos->count(geo)) continue;

    const auto cell = parse_eurostat_cell(fields[*year_col]);
    if (!cell)
      throw FormatError(ln, *year_col + 1, "bad value cell '" + std::string(fields[*year_col]) + "'");
    if (!seen.insert(geo).second)
      throw FormatError(ln, 1, "several series for geo " + geo + "; select one with a dimension filter");
    out.push_back({dataset_code, geo, selection.year, cell->first, cell->second});
  }
  if (out.empty())
    throw EmptySelection(dataset_code + ": no row matches the selection for " + std::to_string(selection.year));
  return out;
}

}  // namespace gcm
