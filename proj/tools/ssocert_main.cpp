#include "ssocert/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return ssocert::cli::run(argc, argv, std::cout, std::cerr);
}
