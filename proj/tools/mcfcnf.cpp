#include <iostream>
#include <string>
#include <vector>

#include "mcfcnf/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mcfcnf::cli::run(args, std::cout, std::cerr);
}
