#include <iostream>

#include "randzeros/cli.hpp"

int main(int argc, char** argv) { return rz::cli::dispatch(argc, argv, std::cout, std::cerr); }
