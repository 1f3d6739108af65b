#include <iostream>

#include "mechforge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mechforge::cli::run(args, std::cout, std::cerr);
}
