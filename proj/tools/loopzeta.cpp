#include <iostream>

#include "loopzeta/cli.hpp"

int main(int argc, char** argv) { return loopzeta::cli::main_entry(argc, argv, std::cout, std::cerr); }
