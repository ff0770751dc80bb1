#include <iostream>

#include "roadgraph/cli.hpp"

int main(int argc, char** argv) { return roadgraph::cli::run_cli(argc, argv, std::cout, std::cerr); }
