#include <iostream>

#include "safecorridor_tools/cli.hpp"

int main(int argc, char** argv) { return safecorridor::tools::run_cli(argc, argv, std::cout, std::cerr); }
