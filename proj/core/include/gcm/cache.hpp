#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>

namespace gcm {

/// On-disk store of raw API response bodies.
///
/// Each entry is two files in the cache directory: `<key>.json` holding the
/// body verbatim and `<key>.meta.json` holding {key, url, fetched_at, bytes}.
/// Both are written to a unique temporary name and renamed into place, so a
/// reader sees either nothing or a complete file even with concurrent writers.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  /// "<code>_<year>_<geo1>-<geo2>-..." with geos in sorted order; lists longer
  /// than 96 characters are replaced by "<count>geos-<fnv1a64 hex>".
  static std::string key(const std::string& code, int year, const std::set<std::string>& geos);

  std::optional<std::string> load(const std::string& key) const;
  void store(const std::string& key, const std::string& body, const std::string& url) const;

  std::filesystem::path body_path(const std::string& key) const;
  std::filesystem::path meta_path(const std::string& key) const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace gcm
