#include "flowseq/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return flowseq::cli::run(argc, argv, std::cout, std::cerr); }
