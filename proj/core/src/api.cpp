#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "gcm/cache.hpp"
#include "gcm/detail/parallel.hpp"
#include "gcm/error.hpp"
#include "gcm/ingest.hpp"
#include "text.hpp"

namespace gcm {

using nlohmann::json;

namespace {

struct Dimension {
  std::string id;
  std::size_t size = 0;
  std::vector<std::string> categories;  // by position
};

Dimension read_dimension(const json& doc, const std::string& id, std::size_t size, const std::string& code) {
  const auto& dims = doc.at("dimension");
  if (!dims.contains(id)) throw DecodeError(code, "dimension '" + id + "' listed in id but not described");
  const auto& cat = dims.at(id).value("category", json::object());
  Dimension d{id, size, std::vector<std::string>(size)};
  if (!cat.contains("index")) {
    if (size == 1 && cat.contains("label") && cat.at("label").size() == 1) {
      d.categories[0] = cat.at("label").begin().key();
      return d;
    }
    throw DecodeError(code, "dimension '" + id + "' has no category index");
  }
  const auto& index = cat.at("index");
  if (index.is_array()) {
    if (index.size() != size) throw DecodeError(code, "dimension '" + id + "' index does not match size");
    for (std::size_t k = 0; k < size; ++k) d.categories[k] = index[k].get<std::string>();
  } else if (index.is_object()) {
    if (index.size() != size) throw DecodeError(code, "dimension '" + id + "' index does not match size");
    for (const auto& [name, pos] : index.items()) {
      const auto p = pos.get<std::size_t>();
      if (p >= size) throw DecodeError(code, "dimension '" + id + "' index position out of range");
      d.categories[p] = name;
    }
  } else {
    throw DecodeError(code, "dimension '" + id + "' index is neither array nor object");
  }
  return d;
}

/// Sparse-or-dense JSON-stat array lookup ("value", "status").
const json* cell_at(const json& container, std::size_t flat) {
  if (container.is_array()) return flat < container.size() ? &container[flat] : nullptr;
  if (container.is_object()) {
    auto it = container.find(std::to_string(flat));
    return it == container.end() ? nullptr : &*it;
  }
  return nullptr;
}

std::set<std::string> decode_flags(const json* status, const std::string& code) {
  std::set<std::string> flags;
  if (!status || status->is_null()) return flags;
  if (!status->is_string()) throw DecodeError(code, "status entry is not a string");
  for (char c : status->get<std::string>()) {
    if (c == ' ' || c == ':') continue;
    if (c < 'a' || c > 'z') throw DecodeError(code, std::string("unexpected status flag '") + c + "'");
    flags.insert(std::string(1, c));
  }
  return flags;
}

}  // namespace

std::vector<RawObservation> decode_jsonstat(std::string_view body, const std::string& code) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw DecodeError(code, std::string("invalid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("id") || !doc.contains("size") || !doc.contains("dimension") ||
        !doc.contains("value"))
      throw DecodeError(code, "missing one of id/size/dimension/value");
    const auto ids = doc.at("id").get<std::vector<std::string>>();
    const auto sizes = doc.at("size").get<std::vector<std::size_t>>();
    if (ids.size() != sizes.size()) throw DecodeError(code, "id and size differ in length");

    std::vector<Dimension> dims;
    std::size_t total = 1;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      dims.push_back(read_dimension(doc, ids[k], sizes[k], code));
      total *= sizes[k];
    }
    std::vector<std::size_t> strides(dims.size(), 1);
    for (std::size_t k = dims.size(); k-- > 1;) strides[k - 1] = strides[k] * dims[k].size;

    std::optional<std::size_t> geo_k, time_k;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      const auto lid = dims[k].id;
      if (lid == "geo")
        geo_k = k;
      else if (lid == "time" || lid == "TIME_PERIOD")
        time_k = k;
      else if (dims[k].size != 1)
        throw DecodeError(code, "dimension '" + lid + "' has " + std::to_string(dims[k].size) +
                                    " categories; expected exactly one");
    }
    if (!geo_k || !time_k) throw DecodeError(code, "response lacks a geo or time dimension");

    const auto& values = doc.at("value");
    if (!values.is_array() && !values.is_object()) throw DecodeError(code, "value is neither array nor object");
    if (values.is_array() && values.size() != total)
      throw DecodeError(code, "dense value array has " + std::to_string(values.size()) + " entries, expected " +
                                  std::to_string(total));
    const json empty = json::object();
    const json& status = doc.contains("status") ? doc.at("status") : empty;

    std::vector<int> years;
    for (const auto& label : dims[*time_k].categories) {
      const auto y = text::parse_int(label);
      if (!y) throw DecodeError(code, "time category '" + label + "' is not a year");
      years.push_back(*y);
    }

    std::vector<RawObservation> out;
    for (std::size_t g = 0; g < dims[*geo_k].size; ++g) {
      for (std::size_t t = 0; t < dims[*time_k].size; ++t) {
        const std::size_t flat = g * strides[*geo_k] + t * strides[*time_k];
        RawObservation obs{code, dims[*geo_k].categories[g], years[t], std::nullopt, {}};
        if (const json* v = cell_at(values, flat); v && !v->is_null()) {
          if (!v->is_number()) throw DecodeError(code, "value at " + std::to_string(flat) + " is not numeric");
          obs.value = v->get<double>();
        }
        obs.flags = decode_flags(cell_at(status, flat), code);
        out.push_back(std::move(obs));
      }
    }
    return out;
  } catch (const json::exception& e) {
    throw DecodeError(code, e.what());
  }
}

std::string dataset_url(const std::string& base_url, const std::string& code, int year,
                        const std::set<std::string>& geos) {
  std::string url = base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  url += "/" + code + "?format=JSON&lang=EN&time=" + std::to_string(year);
  for (const auto& g : geos) url += "&geo=" + g;
  return url;
}

std::vector<RawObservation> fetch_dataset(const EurostatApiSource& source, const std::string& code, int year,
                                          const std::set<std::string>& geos, HttpTransport& transport) {
  if (!source.base_url.starts_with("http://") && !source.base_url.starts_with("https://"))
    throw ConfigError("API base URL must be absolute http(s): '" + source.base_url + "'");

  const ResponseCache cache(source.cache_dir);
  const auto key = ResponseCache::key(code, year, geos);

  std::vector<RawObservation> all;
  if (auto cached = cache.load(key)) {
    all = decode_jsonstat(*cached, code);
  } else {
    const auto url = dataset_url(source.base_url, code, year, geos);
    HttpResponse res;
    try {
      res = transport.get(url);
    } catch (const TransportError& e) {
      throw NetworkError(code, e.what());
    }
    if (res.status < 200 || res.status > 299) throw UpstreamError(code, res.status);
    all = decode_jsonstat(res.body, code);
    cache.store(key, res.body, url);
  }

  std::vector<RawObservation> out;
  for (auto& obs : all)
    if (obs.year == year && geos.count(obs.geo)) out.push_back(std::move(obs));
  return out;
}

ObservationMatrix assemble_matrix(std::span<const IndicatorSpec> specs, int year, std::span<const std::string> geos,
                                  const DataSource& source, const AssembleOptions& options) {
  if (specs.empty()) throw ConfigError("no indicators configured");
  if (geos.empty()) throw ConfigError("no geos configured");

  const std::set<std::string> geo_set(geos.begin(), geos.end());
  if (geo_set.size() != geos.size()) throw ConfigError("geo list contains duplicates");

  std::unique_ptr<HttpTransport> owned;
  HttpTransport* transport = options.transport;
  if (std::holds_alternative<EurostatApiSource>(source) && !transport) {
    owned = std::make_unique<NetworkTransport>();
    transport = owned.get();
  }

  std::optional<ObservationMatrix> fixture;
  if (const auto* f = std::get_if<FixtureCsvSource>(&source)) fixture = parse_fixture_csv(read_file(f->path));

  auto observations_for = [&](const IndicatorSpec& spec) -> std::vector<RawObservation> {
    std::vector<RawObservation> obs;
    if (fixture) {
      const auto& inds = fixture->indicators;
      auto it = std::find_if(inds.begin(), inds.end(), [&](const IndicatorSpec& s) { return s.code == spec.code; });
      if (it == inds.end()) throw MissingDataset(spec.code);
      const auto j = static_cast<std::size_t>(it - inds.begin());
      for (std::size_t i = 0; i < fixture->rows(); ++i)
        if (geo_set.count(fixture->units[i]))
          obs.push_back({spec.code, fixture->units[i], year, fixture->values[i][j], {}});
    } else if (const auto* tsv = std::get_if<EurostatTsvSource>(&source)) {
      auto p = tsv->paths.find(spec.code);
      if (p == tsv->paths.end()) throw ConfigError("no TSV file configured for " + spec.code);
      TsvSelection sel{year, geo_set, {}};
      if (auto d = tsv->dimensions.find(spec.code); d != tsv->dimensions.end()) sel.dimensions = d->second;
      try {
        obs = parse_eurostat_tsv(read_file(p->second), spec.code, sel);
      } catch (const EmptySelection&) {
        throw MissingDataset(spec.code);
      }
    } else {
      obs = fetch_dataset(std::get<EurostatApiSource>(source), spec.code, year, geo_set, *transport);
    }
    if (obs.empty()) throw MissingDataset(spec.code);
    return obs;
  };

  std::vector<std::vector<RawObservation>> per_spec(specs.size());
  detail::parallel_for(specs.size(), options.threads,
                       [&](std::size_t j) { per_spec[j] = observations_for(specs[j]); });

  ObservationMatrix m;
  m.year = year;
  m.units.assign(geos.begin(), geos.end());
  m.indicators.assign(specs.begin(), specs.end());
  m.values.assign(geos.size(), std::vector<Cell>(specs.size()));
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < geos.size(); ++i) row_of[geos[i]] = i;
  for (std::size_t j = 0; j < specs.size(); ++j)
    for (const auto& obs : per_spec[j])
      if (auto it = row_of.find(obs.geo); it != row_of.end()) m.values[it->second][j] = obs.value;
  return m;
}

}  // namespace gcm
