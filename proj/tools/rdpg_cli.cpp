#include <iostream>

#include "rdpg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rdpg::run_cli(args, std::cout, std::cerr);
}
