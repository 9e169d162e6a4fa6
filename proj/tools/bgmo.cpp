#include <iostream>
#include <string>
#include <vector>

#include "bgmo/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return bgmo::cli::run(args, std::cout, std::cerr);
}
