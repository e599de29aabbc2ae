#include <iostream>

#include "tacsim_cli/cli.hpp"

int main(int argc, char** argv) { return tacsim::cli::run(argc, argv, std::cout, std::cerr); }
