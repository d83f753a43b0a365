// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "aqft/cli.hpp"

int main(int argc, char** argv) { return aqft::cli::run(argc, argv, std::cout, std::cerr); }
