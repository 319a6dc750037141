#include <iostream>

#include "kdim/cli.hpp"

int main(int argc, char** argv) { return kdim::kdim_main(argc, argv, std::cout, std::cerr); }
