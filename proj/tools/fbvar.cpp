#include "fbvar/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return fbvar::run_cli(argc, argv, std::cout, std::cerr); }
