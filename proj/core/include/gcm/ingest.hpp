#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gcm/http.hpp"
#include "gcm/model.hpp"

namespace gcm {

/// One (dataset, geo, year) data point as published by Eurostat.
struct RawObservation {
  std::string dataset_code;
  std::string geo;
  int year = 0;
  std::optional<double> value;
  /// Single lowercase letters, e.g. "e" estimated, "p" provisional, "b" break.
  std::set<std::string> flags;

  friend bool operator==(const RawObservation&, const RawObservation&) = default;
};

// ---------------------------------------------------------------------------
// Fixture CSV
// ---------------------------------------------------------------------------

/// Parses the project's fixture CSV ("geo,<code>,<code>..." header, one row
/// per geo, empty cell = missing).
///
/// With `known` empty every header code becomes a stimulant indicator labelled
/// by its code. Otherwise each header code must be present in `known` and its
/// spec is used as-is. Throws FormatError with 1-based line/column.
ObservationMatrix parse_fixture_csv(std::string_view text, std::span<const IndicatorSpec> known = {},
                                    int year = 0);

/// Inverse of parse_fixture_csv. Numbers use the shortest representation that
/// round-trips; lines end in '\n'.
std::string serialize_fixture_csv(const ObservationMatrix& matrix);

// ---------------------------------------------------------------------------
// Eurostat bulk-download TSV
// ---------------------------------------------------------------------------

struct TsvSelection {
  int year = 0;
  /// Restricts output to these geos when set.
  std::optional<std::set<std::string>> geos;
  /// Dimension name -> required value, for files that carry several series
  /// (e.g. {"unit", "PC_ENT"}).
  std::map<std::string, std::string> dimensions;
};

/// Throws FormatError for a malformed header or data line, and
/// EmptySelection when nothing matches.
std::vector<RawObservation> parse_eurostat_tsv(std::string_view text, const std::string& dataset_code,
                                               const TsvSelection& selection);

/// Splits a Eurostat cell such as "11 e", ": ", "0.5 bp" into value and flags.
/// Returns nullopt for a token that is neither ':' nor a number.
std::optional<std::pair<std::optional<double>, std::set<std::string>>> parse_eurostat_cell(std::string_view cell);

// ---------------------------------------------------------------------------
// Statistics API (JSON-stat 2.0)
// ---------------------------------------------------------------------------

/// Decodes every (geo, time) cell of a JSON-stat 2.0 dataset. All dimensions
/// other than geo and time must have exactly one category. Throws DecodeError.
std::vector<RawObservation> decode_jsonstat(std::string_view body, const std::string& dataset_code);

struct FixtureCsvSource {
  std::filesystem::path path;
};

struct EurostatTsvSource {
  std::map<std::string, std::filesystem::path> paths;  ///< dataset code -> file
  std::map<std::string, std::map<std::string, std::string>> dimensions;  ///< optional per-code series filter
};

struct EurostatApiSource {
  std::string base_url;
  std::filesystem::path cache_dir;
};

using DataSource = std::variant<FixtureCsvSource, EurostatTsvSource, EurostatApiSource>;

inline constexpr const char* kDefaultApiBaseUrl =
    "https://ec.europa.eu/eurostat/api/dissemination/statistics/1.0/data";

/// "<base>/<code>?format=JSON&lang=EN&time=<year>&geo=<g1>&geo=<g2>..."
std::string dataset_url(const std::string& base_url, const std::string& code, int year,
                        const std::set<std::string>& geos);

/// One GET per call; responses are cached verbatim and served from the cache
/// on identical later requests without touching the transport.
std::vector<RawObservation> fetch_dataset(const EurostatApiSource& source, const std::string& dataset_code,
                                          int year, const std::set<std::string>& geos,
                                          HttpTransport& transport);

struct AssembleOptions {
  /// Used for EurostatApiSource; a NetworkTransport is created when null.
  HttpTransport* transport = nullptr;
  /// Concurrent per-indicator fetches.
  unsigned threads = 1;
};

/// Builds a |geos| x |specs| matrix. Geos absent upstream become missing
/// cells; a dataset with no observation at all raises MissingDataset.
ObservationMatrix assemble_matrix(std::span<const IndicatorSpec> specs, int year,
                                  std::span<const std::string> geos, const DataSource& source,
                                  const AssembleOptions& options = {});

/// Reads a whole file; throws IoError.
std::string read_file(const std::filesystem::path& path);

}  // namespace gcm
