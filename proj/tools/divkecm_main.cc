#include <iostream>

#include "divkecm/runner.h"

int main(int argc, char** argv) { return divkecm::run_cli(argc, argv, std::cout, std::cerr); }
