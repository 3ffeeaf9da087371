#include "gcm/http.hpp"

#include <stdexcept>

#include <httplib.h>

namespace gcm {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("URL is not absolute: " + url);
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https")
    throw std::invalid_argument("unsupported URL scheme '" + scheme + "' in " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == scheme_end + 3) throw std::invalid_argument("URL has no host: " + url);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

HttpResponse NetworkTransport::get(const std::string& url) {
  std::pair<std::string, std::string> parts;
  try {
    parts = split_url(url);
  } catch (const std::invalid_argument& e) {
    throw TransportError(e.what());
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (parts.first.starts_with("https://")) throw TransportError("built without TLS support: " + url);
#endif
  httplib::Client client(parts.first);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_follow_location(true);
  auto res = client.Get(parts.second);
  if (!res) throw TransportError(httplib::to_string(res.error()) + " (" + url + ")");
  return {res->status, res->body};
}

}  // namespace gcm
