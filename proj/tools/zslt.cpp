// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "zslt/cli.hpp"

int main(int argc, char** argv) { return zslt::cli::main_entry(argc, argv, std::cout, std::cerr); }
