#include <iostream>

#include "qtk/cli.hpp"

int main(int argc, char **argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qtk::run_cli(args, std::cout, std::cerr);
}
