#include <iostream>

#include "willmore/cli.hpp"

int main(int argc, char** argv) { return willmore::cli::main(argc, argv, std::cout, std::cerr); }
