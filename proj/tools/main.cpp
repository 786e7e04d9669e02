#include <iostream>

#include "composable/cli.hpp"

int main(int argc, char** argv) {
    return composable::run_command(argc, argv, std::cout, std::cerr);
}
