#include <iostream>
#include <string>
#include <vector>

#include "seqsel/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return seqsel::run_cli(args, std::cout, std::cerr);
}
