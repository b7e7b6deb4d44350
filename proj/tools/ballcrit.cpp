#include <iostream>

#include "ballcrit/cli.hpp"

int main(int argc, char** argv) { return ballcrit::run_cli(argc, argv, std::cout, std::cerr); }
