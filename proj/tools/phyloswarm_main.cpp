#include <iostream>
#include <string>
#include <vector>

#include "phyloswarm/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return phyloswarm::cli_main(args, std::cout, std::cerr);
}
