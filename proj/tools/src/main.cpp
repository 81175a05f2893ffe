#include <iostream>

#include "slm/cli/app.hpp"

int main(int argc, char** argv)
{
    return slm::cli::run(argc, argv, std::cout, std::cerr);
}
