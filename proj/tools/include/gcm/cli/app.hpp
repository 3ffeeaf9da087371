#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gcm/http.hpp"

namespace gcm::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitIngest = 2, kExitCompute = 3 };

/// Process-level inputs that tests replace.
struct Environment {
  /// Value of GCM_EUROSTAT_BASE_URL, if set.
  std::optional<std::string> api_base_url;
  /// Transport for API sources; a NetworkTransport is used when null.
  HttpTransport* transport = nullptr;
};

Environment environment_from_process();

/// Runs one command. `args` excludes the program name. Reports go to `out`
/// (or the --output file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env);

}  // namespace gcm::cli
