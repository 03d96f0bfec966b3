#include <iostream>

#include "pepkit/cli.hpp"

int main(int argc, char** argv) { return pepkit::run_cli(argc, argv, std::cout, std::cerr); }
