#include <iostream>
#include <string>
#include <vector>

#include "lshmodel/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return lshmodel::cli::run(args, std::cout, std::cerr);
}
