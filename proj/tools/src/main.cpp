#include <iostream>

#include "lbexact_cli/cli.hpp"

int main(int argc, char** argv) {
  return lbexact::cli::cli_main(argc, argv, std::cout, std::cerr);
}
