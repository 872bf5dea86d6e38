#include "detext/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return detext::cli::run(argc, argv, std::cout, std::cerr); }
