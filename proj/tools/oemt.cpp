#include <iostream>

#include "oemt/cli/app.hpp"

int main(int argc, char** argv) { return oemt::cli::run(argc, argv, std::cout, std::cerr); }
