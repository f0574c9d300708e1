#include <iostream>

#include "necrotic/cli.hpp"

int main(int argc, char** argv) {
  return necrotic::cli::run(argc, argv, std::cout, std::cerr);
}
