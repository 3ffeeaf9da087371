#pragma once

#include <chrono>
#include <stdexcept>
#include <string>

namespace gcm {

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Raised by a transport when no HTTP response was obtained at all.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimal GET-only transport so that the API client can be driven by a stub
/// in tests. Implementations must be safe to call from several threads.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& url) = 0;
};

/// Real network transport (cpp-httplib, with TLS when built with OpenSSL).
class NetworkTransport final : public HttpTransport {
 public:
  explicit NetworkTransport(std::chrono::seconds timeout = std::chrono::seconds(30)) : timeout_(timeout) {}
  HttpResponse get(const std::string& url) override;

 private:
  std::chrono::seconds timeout_;
};

/// Splits "scheme://host[:port]/path?query" into origin and path+query.
/// Throws std::invalid_argument when the URL is not absolute http(s).
std::pair<std::string, std::string> split_url(const std::string& url);

}  // namespace gcm
