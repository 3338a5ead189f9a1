#include <iostream>

#include "gll/cli.hpp"

int main(int argc, char** argv) { return gll::cli::run(argc, argv, std::cout, std::cerr); }
