#include <iostream>
#include <string>
#include <vector>

#include "cubecolor/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cubecolor::run_cli(args, std::cout, std::cerr);
}
