#include <iostream>

#include "wqn/cli.hpp"

int main(int argc, char** argv) { return wqn::run_cli(argc, argv, std::cout, std::cerr); }
