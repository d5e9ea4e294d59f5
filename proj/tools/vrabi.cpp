#include <iostream>

#include "vrabi/commands.hpp"

int main(int argc, char** argv) { return vrabi::run_cli(argc, argv, std::cout, std::cerr); }
