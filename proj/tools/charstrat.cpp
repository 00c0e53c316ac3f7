#include <iostream>

#include "charstrat/cli.hpp"

int main(int argc, char** argv) { return charstrat::run_cli(argc, argv, std::cout, std::cerr); }
