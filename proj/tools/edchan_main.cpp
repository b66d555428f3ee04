#include <iostream>

#include "edchan/cli.hpp"

int main(int argc, char** argv) { return edchan::cli::run(argc, argv, std::cout, std::cerr); }
