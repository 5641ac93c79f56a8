#include <iostream>
#include <string>
#include <vector>

#include "zonopriv/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    return zonopriv::run_cli(args, std::cout, std::cerr);
}
