#include <iostream>

#include "wnl/cli.hpp"

int main(int argc, char** argv) { return wnl::run_cli(argc, argv, std::cout, std::cerr); }
