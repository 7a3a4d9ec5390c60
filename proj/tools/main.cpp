#include <iostream>

#include "qsat2/cli.hpp"

int main(int argc, char** argv) { return qsat2::run_cli(argc, argv, std::cout, std::cerr); }
