#include <iostream>

#include "dyncp/cli.hpp"

int main(int argc, char** argv) {
  return dyncp::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
