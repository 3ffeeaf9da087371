#include <iostream>

#include "gcm/cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gcm::cli::run(args, std::cout, std::cerr, gcm::cli::environment_from_process());
}
