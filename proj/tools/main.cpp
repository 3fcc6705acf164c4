#include <iostream>
#include <string>
#include <vector>

#include "bcosfire/cli.hpp"

int main(int argc, char** argv) {
  return bcosfire::cli_main(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
