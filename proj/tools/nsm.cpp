#include <iostream>
#include <string>
#include <vector>

#include "nsm/cli.hpp"

int main(int argc, char** argv) {
    return nsm::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
