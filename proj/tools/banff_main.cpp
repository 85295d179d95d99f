#include <iostream>

#include "banff/cli.hpp"

int main(int argc, char** argv) { return banff::cli::run(argc, argv, std::cout, std::cerr); }
