#include <iostream>

#include "mostowkit/cli.hpp"

int main(int argc, char** argv) {
  return mostowkit::cli::run(argc, argv, std::cout, std::cerr);
}
