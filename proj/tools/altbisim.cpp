#include <iostream>

#include "altbisim/cli.hpp"

int main(int argc, char** argv) {
  return altbisim::run_cli(argc, argv, std::cout, std::cerr);
}
