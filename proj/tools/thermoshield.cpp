#include <iostream>

#include "thermoshield/cli.hpp"

int main(int argc, char** argv) {
  return thermoshield::run(argc, argv, std::cout, std::cerr);
}
