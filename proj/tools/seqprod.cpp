#include <iostream>

#include "seqprod/cli.hpp"

int main(int argc, char** argv) { return seqprod::run_cli(argc, argv, std::cout, std::cerr); }
