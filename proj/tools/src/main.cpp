#include <iostream>
#include <string>
#include <vector>

#include "lupi_occ_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lupi_occ::cli::run_cli(args, std::cout, std::cerr);
}
