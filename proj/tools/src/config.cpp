#include "gcm/cli/config.hpp"

#include <algorithm>
#include <initializer_list>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "gcm/error.hpp"

namespace gcm::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(fmt::format("config: {}: {}", where, what));
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed,
                std::initializer_list<const char*> required) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      fail(where, "unknown key \"" + key + "\"");
  }
  for (const char* key : required) {
    if (!obj.contains(key)) fail(where, fmt::format("missing key \"{}\"", key));
  }
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

template <typename Enum, typename Parse>
Enum get_policy(const json& obj, const char* key, Enum fallback, Parse parse) {
  if (!obj.contains(key)) return fallback;
  const auto text = get_string(obj, key, "config");
  const auto parsed = parse(text);
  if (!parsed) fail(key, "unknown value \"" + text + "\"");
  return *parsed;
}

DataSource parse_source(const json& src, const std::filesystem::path& base) {
  if (!src.is_object() || !src.contains("type")) fail("source", "expected an object with a \"type\" key");
  const auto type = get_string(src, "type", "source");

  if (type == "fixture_csv") {
    check_keys(src, "source", {"type", "path"}, {"path"});
    return FixtureCsvSource{resolve(base, get_string(src, "path", "source"))};
  }
  if (type == "eurostat_tsv") {
    check_keys(src, "source", {"type", "paths", "dimensions"}, {"paths"});
    EurostatTsvSource out;
    const auto& paths = src.at("paths");
    if (!paths.is_object()) fail("source.paths", "expected an object of code -> file");
    for (const auto& [code, file] : paths.items()) {
      if (!file.is_string()) fail("source.paths." + code, "expected a string");
      out.paths[code] = resolve(base, file.get<std::string>());
    }
    if (src.contains("dimensions")) {
      const auto& dims = src.at("dimensions");
      if (!dims.is_object()) fail("source.dimensions", "expected an object");
      for (const auto& [code, filter] : dims.items()) {
        if (!filter.is_object()) fail("source.dimensions." + code, "expected an object");
        for (const auto& [dim, value] : filter.items()) {
          if (!value.is_string()) fail("source.dimensions." + code + "." + dim, "expected a string");
          out.dimensions[code][dim] = value.get<std::string>();
        }
      }
    }
    return out;
  }
  if (type == "eurostat_api") {
    check_keys(src, "source", {"type", "base_url", "cache_dir"}, {"cache_dir"});
    EurostatApiSource out;
    if (src.contains("base_url")) {
      out.base_url = get_string(src, "base_url", "source");
      if (out.base_url.empty()) fail("source.base_url", "must not be empty");
    }
    out.cache_dir = resolve(base, get_string(src, "cache_dir", "source"));
    return out;
  }
  fail("source.type", "unknown source type \"" + type + "\"");
}

}  // namespace

PipelineSettings RunConfig::settings(unsigned threads) const {
  PipelineSettings s;
  s.missing = missing_policy;
  s.tie = tie_policy;
  s.constant_column = constant_column_policy;
  s.threads = threads;
  return s;
}

RunConfig default_config() {
  RunConfig c;
  c.name = "eu28-2019";
  c.year = 2019;
  c.geos = {"BE", "BG", "CZ", "DK", "DE", "EE", "IE", "EL", "ES", "FR", "HR", "IT", "CY", "LV",
            "LT", "LU", "HU", "MT", "NL", "AT", "PL", "PT", "RO", "SI", "SK", "FI", "SE", "UK"};
  const std::pair<const char*, const char*> indicators[] = {
      {"tin00111", "Enterprises having received orders online (% of enterprises)"},
      {"tin00110", "Enterprises' turnover from e-commerce (%)"},
      {"tin00090", "Enterprises with broadband access (% of enterprises)"},
      {"tin00125", "Enterprises providing portable devices for mobile internet access to employees (%)"},
      {"tin00126", "Enterprises using RFID (%)"},
      {"tin00115", "Enterprises with business processes linked automatically to suppliers or customers (%)"},
      {"tin00116", "Enterprises using CRM software to analyse customer information (%)"},
  };
  int j = 0;
  for (const auto& [code, label] : indicators) c.indicators.push_back({code, label, ++j, Direction::Stimulant});
  c.source = EurostatApiSource{"", "cache"};
  return c;
}

RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  check_keys(doc, "config",
             {"name", "year", "geos", "indicators", "missing_policy", "tie_policy", "constant_column_policy",
              "source"},
             {"year", "geos", "indicators", "source"});

  RunConfig c;
  if (doc.contains("name")) c.name = get_string(doc, "name", "config");

  if (!doc.at("year").is_number_integer()) fail("year", "expected an integer");
  c.year = doc.at("year").get<int>();

  const auto& geos = doc.at("geos");
  if (!geos.is_array() || geos.empty()) fail("geos", "expected a non-empty array of strings");
  std::set<std::string> seen_geos;
  for (const auto& g : geos) {
    if (!g.is_string() || g.get<std::string>().empty()) fail("geos", "expected non-empty strings");
    if (!seen_geos.insert(g.get<std::string>()).second) fail("geos", "duplicate geo " + g.get<std::string>());
    c.geos.push_back(g.get<std::string>());
  }

  const auto& indicators = doc.at("indicators");
  if (!indicators.is_array() || indicators.empty()) fail("indicators", "expected a non-empty array");
  std::set<std::string> seen_codes;
  int j = 0;
  for (const auto& ind : indicators) {
    const auto where = fmt::format("indicators[{}]", j);
    check_keys(ind, where, {"code", "label", "direction"}, {"code"});
    IndicatorSpec spec;
    spec.code = get_string(ind, "code", where);
    if (spec.code.empty()) fail(where + ".code", "must not be empty");
    if (!seen_codes.insert(spec.code).second) fail(where + ".code", "duplicate code " + spec.code);
    spec.label = ind.contains("label") ? get_string(ind, "label", where) : spec.code;
    spec.symbol_index = ++j;
    if (ind.contains("direction")) {
      const auto text = get_string(ind, "direction", where);
      const auto d = parse_direction(text);
      if (!d) fail(where + ".direction", "unknown value \"" + text + "\"");
      spec.direction = *d;
    }
    c.indicators.push_back(std::move(spec));
  }

  c.missing_policy = get_policy(doc, "missing_policy", c.missing_policy, parse_missing_policy);
  c.tie_policy = get_policy(doc, "tie_policy", c.tie_policy, parse_tie_policy);
  c.constant_column_policy =
      get_policy(doc, "constant_column_policy", c.constant_column_policy, parse_constant_column_policy);
  c.source = parse_source(doc.at("source"), base_dir);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, path.parent_path());
}

void resolve_base_url(RunConfig& config, const std::optional<std::string>& env_override) {
  auto* api = std::get_if<EurostatApiSource>(&config.source);
  if (!api) return;
  const bool from_env = env_override && !env_override->empty();
  if (from_env && !api->base_url.empty()) {
    throw ConfigError(fmt::format("both {} ({}) and source.base_url ({}) are set; remove one", kBaseUrlEnv,
                                  *env_override, api->base_url));
  }
  if (from_env) {
    api->base_url = *env_override;
  } else if (api->base_url.empty()) {
    api->base_url = kDefaultApiBaseUrl;
  }
}

}  // namespace gcm::cli
