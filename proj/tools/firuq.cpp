#include <iostream>

#include "firuq/cli.hpp"

int main(int argc, char** argv) { return firuq::cli::run(argc, argv, std::cout, std::cerr); }
