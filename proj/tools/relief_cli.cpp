#include <string>
#include <vector>

#include "relief/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return relief::cli_dispatch(args);
}
