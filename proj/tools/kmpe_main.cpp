#include <iostream>

#include "kmpe/cli.hpp"

int main(int argc, char** argv) { return kmpe::cli::run(argc, argv, std::cout, std::cerr); }
