#include <iostream>

#include "qsens_cli/cli.hpp"

int main(int argc, char** argv) {
  return qsens::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
