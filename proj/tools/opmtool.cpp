#include "opm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return opm::cli::run(argc, argv, std::cout, std::cerr); }
