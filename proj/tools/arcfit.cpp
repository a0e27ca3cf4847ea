#include <iostream>

#include "arcfit/cli.hpp"

int main(int argc, char** argv) { return arcfit::run_cli(argc, argv, std::cout, std::cerr); }
