#include <iostream>
#include <string>
#include <vector>

#include "arsum/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return arsum::cli_dispatch(args, std::cout, std::cerr);
}
