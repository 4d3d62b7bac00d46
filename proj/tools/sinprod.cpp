#include <iostream>

#include "sinprod/cli.hpp"

int main(int argc, char** argv) { return sinprod::cli::run(argc, argv, std::cout, std::cerr); }
