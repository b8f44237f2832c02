#include <iostream>

#include "essaymrc/cli.hpp"

int main(int argc, char** argv) { return essaymrc::cli_main(argc, argv, std::cout, std::cerr); }
