#include <iostream>

#include "trapfactor/cli.hpp"

int main(int argc, char** argv) {
    return trapfactor::cli::main_entry(argc, argv, std::cout, std::cerr);
}
