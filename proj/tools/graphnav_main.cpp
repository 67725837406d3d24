#include <string>
#include <vector>

#include "graphnav/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return graphnav::run_command(args);
}
