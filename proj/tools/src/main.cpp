#include <iostream>

#include "cavcool_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cavcool::cli::run(args, std::cout, std::cerr);
}
