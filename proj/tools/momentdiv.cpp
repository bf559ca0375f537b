#include <iostream>

#include "momentdiv/cli.hpp"

int main(int argc, char** argv) { return momentdiv::run_cli(argc, argv, std::cout, std::cerr); }
