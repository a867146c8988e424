#include <iostream>

#include "varelim/cli.hpp"

int main(int argc, char** argv) { return varelim::run_cli(argc, argv, std::cout, std::cerr); }
