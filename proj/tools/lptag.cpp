#include <iostream>

#include "lptag/cli.hpp"

int main(int argc, char** argv) { return lptag::cli::dispatch(argc, argv, std::cout, std::cerr); }
