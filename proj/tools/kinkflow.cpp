#include <vector>

#include "kinkflow/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kinkflow::cli::run(std::move(args));
}
