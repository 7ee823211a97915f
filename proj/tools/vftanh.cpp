#include <iostream>

#include "vftanh/cli.hpp"

int main(int argc, char** argv) { return vftanh::cli::run(argc, argv, std::cout, std::cerr); }
