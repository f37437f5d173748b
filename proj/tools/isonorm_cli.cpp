#include <iostream>

#include "isonorm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return isonorm::cli::run(args, std::cout, std::cerr);
}
