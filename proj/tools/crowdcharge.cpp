#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "crowdcharge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> seed;
  if (const char* env = std::getenv("CROWDCHARGE_SEED")) seed = env;
  return crowdcharge::run_cli(args, seed, std::cout, std::cerr);
}
