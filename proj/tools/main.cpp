#include <iostream>

#include "jgreedy/cli.hpp"

int main(int argc, char** argv) { return jgreedy::cli::run(argc, argv, std::cout, std::cerr); }
