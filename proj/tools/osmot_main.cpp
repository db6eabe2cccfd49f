#include <iostream>

#include "osmot/cli.hpp"

int main(int argc, char** argv) {
  return osmot::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
