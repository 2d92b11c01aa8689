#include <iostream>

#include "treesne/cli.hpp"

int main(int argc, char** argv) { return treesne::run_cli(argc, argv, std::cout, std::cerr); }
