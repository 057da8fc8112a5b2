#include <iostream>

#include "gplan/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return gplan::run_cli(args, std::cout, std::cerr);
}
