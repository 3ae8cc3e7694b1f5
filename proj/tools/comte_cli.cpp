#include <iostream>
#include <string>
#include <vector>

#include "comte/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return comte::run_cli(args, std::cout, std::cerr);
}
