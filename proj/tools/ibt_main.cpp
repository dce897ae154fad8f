#include <iostream>

#include "ibt/bench.hpp"

int main(int argc, char** argv) { return ibt::cli_main(argc, argv, std::cout, std::cerr); }
