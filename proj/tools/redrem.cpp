#include <iostream>

#include "redrem/cli.hpp"

int main(int argc, char** argv) { return redrem::run_cli(argc, argv, std::cout, std::cerr); }
