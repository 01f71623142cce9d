#include <iostream>

#include "rotstokes/cli.hpp"

int main(int argc, char** argv) { return rotstokes::cli::run(argc, argv, std::cout, std::cerr); }
