#include <iostream>

#include "nitireward/cli.hpp"

int main(int argc, char** argv) { return nitireward::run_cli(argc, argv, std::cout, std::cerr); }
