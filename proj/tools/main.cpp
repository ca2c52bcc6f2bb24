#include <iostream>

#include "inhibdesign/cli.hpp"

int main(int argc, char** argv) {
  return inhibdesign::run_cli(argc, argv, std::cout, std::cerr);
}
