#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include "gcm/error.hpp"
#include "gcm/ingest.hpp"
#include "text.hpp"

namespace gcm {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

ObservationMatrix parse_fixture_csv(std::string_view text, std::span<const IndicatorSpec> known, int year) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  const auto lines = text::split_lines(text);

  std::size_t header_line = 0;
  while (header_line < lines.size() && text::trim(lines[header_line]).empty()) ++header_line;
  if (header_line == lines.size()) throw FormatError(1, 0, "empty input, expected a header line");

  const auto header = text::split(lines[header_line], ',');
  const std::size_t hl = header_line + 1;
  if (text::trim(header[0]) != "geo")
    throw FormatError(hl, 1, "first header cell must be 'geo'");
  if (header.size() < 2) throw FormatError(hl, 0, "header names no indicator");

  ObservationMatrix m;
  m.year = year;
  std::set<std::string> codes;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string code(text::trim(header[c]));
    if (code.empty()) throw FormatError(hl, c + 1, "empty indicator code");
    if (!codes.insert(code).second) throw FormatError(hl, c + 1, "duplicate indicator code " + code);
    if (known.empty()) {
      m.indicators.push_back({code, code, static_cast<int>(c), Direction::Stimulant});
    } else {
      auto it = std::find_if(known.begin(), known.end(), [&](const IndicatorSpec& s) { return s.code == code; });
      if (it == known.end()) throw FormatError(hl, c + 1, "indicator " + code + " is not configured");
      m.indicators.push_back(*it);
    }
  }

  std::set<std::string> geos;
  for (std::size_t l = header_line + 1; l < lines.size(); ++l) {
    if (text::trim(lines[l]).empty()) continue;
    const std::size_t ln = l + 1;
    const auto cells = text::split(lines[l], ',');
    if (cells.size() != header.size())
      throw FormatError(ln, 0, "expected " + std::to_string(header.size()) + " cells, found " +
                                   std::to_string(cells.size()));
    const std::string geo(text::trim(cells[0]));
    if (geo.empty()) throw FormatError(ln, 1, "empty geo code");
    if (!geos.insert(geo).second) throw FormatError(ln, 1, "duplicate geo code " + geo);

    std::vector<Cell> row;
    row.reserve(cells.size() - 1);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const auto cell = text::trim(cells[c]);
      if (cell.empty()) {
        row.emplace_back(std::nullopt);
        continue;
      }
      const auto v = text::parse_double(cell);
      if (!v) throw FormatError(ln, c + 1, "not a number: '" + std::string(cell) + "'");
      row.emplace_back(*v);
    }
    m.units.push_back(geo);
    m.values.push_back(std::move(row));
  }
  return m;
}

std::string serialize_fixture_csv(const ObservationMatrix& m) {
  std::string out = "geo";
  for (const auto& spec : m.indicators) out += "," + spec.code;
  out += '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out += m.units[i];
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out += ',';
      if (const auto& cell = m.values.at(i).at(j)) out += text::format_shortest(*cell);
    }
    out += '\n';
  }
  return out;
}

}  // namespace gcm
