#include "complab/harness.hpp"

#include <iostream>

int main(int argc, char** argv) { return complab::cli_main(argc, argv, std::cout, std::cerr); }
