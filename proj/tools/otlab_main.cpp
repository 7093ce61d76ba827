#include <iostream>
#include <string>
#include <vector>

#include "otlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return otlab::run_command(args, std::cout, std::cerr);
}
