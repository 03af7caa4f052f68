#include <iostream>

#include "cvxreg/cli.hpp"

int main(int argc, char** argv) { return cvxreg::run_cli(argc, argv, std::cout, std::cerr); }
