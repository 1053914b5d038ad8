// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "lamm/cli.hpp"

int main(int argc, char** argv) {
    return lamm::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
