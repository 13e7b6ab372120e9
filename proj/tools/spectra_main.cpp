#include <iostream>

#include "spectra/cli.hpp"

int main(int argc, char** argv) { return spectra::cli::main(argc, argv, std::cout, std::cerr); }
