#include <iostream>
#include <string>
#include <vector>

#include "autoten/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return autoten::cli::run(args, std::cout, std::cerr);
}
