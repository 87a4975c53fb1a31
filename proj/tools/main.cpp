#include <iostream>
#include <string>
#include <vector>

#include "augkm/cli.hpp"

int main(int argc, char** argv) {
    return augkm::cli_main(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
