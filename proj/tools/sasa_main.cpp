#include "sasa/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return sasa::run_cli(argc, argv, std::cout, std::cerr);
}
