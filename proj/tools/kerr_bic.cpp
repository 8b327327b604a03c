#include <iostream>

#include "kerr_bic/cli.hpp"

int main(int argc, char** argv) { return kerr_bic::cli::run(argc, argv, std::cout, std::cerr); }
