#include <iostream>
#include <string>
#include <vector>

#include "cvls/cli.hpp"

int main(int argc, char** argv) {
  return cvls::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
