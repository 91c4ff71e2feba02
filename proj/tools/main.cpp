#include <iostream>

#include "routecheck/cli.hpp"

int main(int argc, char** argv) {
    return routecheck::run_cli(argc, argv, std::cout, std::cerr);
}
