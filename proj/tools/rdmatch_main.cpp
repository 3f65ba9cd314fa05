#include <iostream>
#include <string>
#include <vector>

#include "rdmatch/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return rdmatch::cli::run(args, std::cout, std::cerr);
}
