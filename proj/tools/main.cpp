#include <iostream>
#include <string>
#include <vector>

#include "lmival/cli/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return lmival::cli::run(args, std::cout, std::cerr);
}
