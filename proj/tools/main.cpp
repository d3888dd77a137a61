#include "quadcurl/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return quadcurl::run_cli(argc, argv, std::cout, std::cerr); }
