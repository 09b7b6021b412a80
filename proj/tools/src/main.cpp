#include <iostream>

#include "resvol/cli.hpp"

int main(int argc, char** argv) { return resvol::run_cli(argc, argv, std::cout, std::cerr); }
