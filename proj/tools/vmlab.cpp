#include <iostream>
#include <string>
#include <vector>

#include "vmlab/cli.hpp"

int main(int argc, char** argv) {
  return vmlab::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
