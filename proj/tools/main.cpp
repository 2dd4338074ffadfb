#include <iostream>

#include "ratedist/cli.hpp"

int main(int argc, char** argv) {
    return ratedist::cli_main(argc, argv, std::cout, std::cerr);
}
