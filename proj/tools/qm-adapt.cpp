#include <iostream>

#include "qmadapt/cli.hpp"

int main(int argc, char** argv) { return qmadapt::cli::run(argc, argv, std::cout, std::cerr); }
