#include <iostream>

#include "sfp/cli.hpp"

int main(int argc, char** argv) { return sfp::cli_dispatch(argc, argv, std::cout, std::cerr); }
