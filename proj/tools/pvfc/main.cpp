#include <iostream>
#include <string>
#include <vector>

#include "pvfc/cli.hpp"

int main(int argc, char** argv) {
    return pvfc::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
