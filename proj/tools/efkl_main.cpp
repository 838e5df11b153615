#include <string>
#include <vector>

#include "efk/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return efk::run_cli(args);
}
