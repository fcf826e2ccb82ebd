#include <iostream>

#include "chimera_sat/cli.hpp"

int main(int argc, char** argv) { return chimera_sat::run_cli(argc, argv, std::cout, std::cerr); }
