#include <iostream>

#include "mcusnn/cli.hpp"

int main(int argc, char** argv) { return mcusnn::cli::main(argc, argv, std::cout, std::cerr); }
