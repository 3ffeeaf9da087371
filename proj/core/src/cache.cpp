#include "gcm/cache.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <thread>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "gcm/error.hpp"

namespace gcm {

namespace fs = std::filesystem;

namespace {

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (auto& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  return out;
}

std::string unique_suffix() {
  static std::atomic<unsigned long> counter{0};
  static const unsigned long process_salt = std::random_device{}();
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  return fmt::format("{:x}.{:x}.{}", process_salt, tid, counter.fetch_add(1));
}

void write_atomic(const fs::path& target, const std::string& content) {
  const fs::path tmp = target.string() + ".tmp." + unique_suffix();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write cache file " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("short write to cache file " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move cache file into place: " + target.string());
  }
}

}  // namespace

std::string ResponseCache::key(const std::string& code, int year, const std::set<std::string>& geos) {
  std::string joined;
  for (const auto& g : geos) {
    if (!joined.empty()) joined += '-';
    joined += g;
  }
  // Long geo lists would exceed NAME_MAX; fall back to a 64-bit FNV-1a digest.
  if (joined.size() > 96) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : joined) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    joined = fmt::format("{}geos-{:016x}", geos.size(), h);
  }
  return sanitize(code) + "_" + std::to_string(year) + "_" + sanitize(joined);
}

fs::path ResponseCache::body_path(const std::string& key) const { return dir_ / (key + ".json"); }
fs::path ResponseCache::meta_path(const std::string& key) const { return dir_ / (key + ".meta.json"); }

std::optional<std::string> ResponseCache::load(const std::string& key) const {
  std::ifstream in(body_path(key), std::ios::binary);
  if (!in) return std::nullopt;
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void ResponseCache::store(const std::string& key, const std::string& body, const std::string& url) const {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create cache directory " + dir_.string() + ": " + ec.message());

  write_atomic(body_path(key), body);
  const auto now = fmt::gmtime(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now()));
  nlohmann::json meta = {
      {"key", key},
      {"url", url},
      {"fetched_at", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", now)},
      {"bytes", body.size()},
  };
  write_atomic(meta_path(key), meta.dump(2) + "\n");
}

}  // namespace gcm
