#include <iostream>
#include <string>
#include <vector>

#include "snorelda/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return snore::run_cli(args, std::cout, std::cerr);
}
