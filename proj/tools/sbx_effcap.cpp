#include <iostream>

#include "sbx/cli.hpp"

int main(int argc, char** argv) { return sbx::cli::run(argc, argv, std::cout, std::cerr); }
