#include <iostream>
#include <string>
#include <vector>

#include "marsim/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return marsim::run_cli(std::move(args), std::cout, std::cerr);
}
