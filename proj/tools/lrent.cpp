#include <iostream>

#include "lrent/cli.hpp"

int main(int argc, char** argv) { return lrent::cli::run(argc, argv, std::cout, std::cerr); }
