#include <string>
#include <vector>

#include "spinfe/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return spinfe::run_cli(args);
}
