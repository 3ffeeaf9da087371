#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gcm/ingest.hpp"
#include "gcm/measure.hpp"

namespace gcm::cli {

/// Environment variable overriding the statistics API base URL.
inline constexpr const char* kBaseUrlEnv = "GCM_EUROSTAT_BASE_URL";

/// A run as described by a JSON config file:
///
///   {
///     "name": "eu28-2019",
///     "year": 2019,
///     "geos": ["BE", "BG", ...],
///     "indicators": [{"code": "tin00111", "label": "...", "direction": "stimulant"}, ...],
///     "missing_policy": "fail",                 // drop_unit | drop_indicator | impute_column_mean
///     "tie_policy": "higher_group",             // lower_group
///     "constant_column_policy": "error",        // drop_indicator
///     "source": {"type": "eurostat_api", "base_url": "...", "cache_dir": "cache"}
///   }
///
/// Other source types are {"type": "fixture_csv", "path": ...} and
/// {"type": "eurostat_tsv", "paths": {code: file}, "dimensions": {code: {dim: value}}}.
/// Relative paths resolve against the directory holding the config file.
struct RunConfig {
  std::string name;
  int year = 0;
  std::vector<std::string> geos;
  std::vector<IndicatorSpec> indicators;
  MissingPolicy missing_policy = MissingPolicy::Fail;
  TiePolicy tie_policy = TiePolicy::HigherGroup;
  ConstantColumnPolicy constant_column_policy = ConstantColumnPolicy::Error;
  DataSource source;

  PipelineSettings settings(unsigned threads = 1) const;
};

/// EU-28 / 2019 with the seven e-business indicators, fetched from the
/// statistics API into ./cache. Identical to data/eu28_2019.json.
RunConfig default_config();

/// Throws ConfigError naming the offending key. An API source without a
/// "base_url" key keeps base_url empty until resolve_base_url runs.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});

/// parse_config on the file's content with base_dir set to its directory.
RunConfig load_config(const std::filesystem::path& path);

/// Fills in the API base URL from the environment override or the default.
/// Throws ConfigError when both the config key and the override are set.
void resolve_base_url(RunConfig& config, const std::optional<std::string>& env_override);

}  // namespace gcm::cli
