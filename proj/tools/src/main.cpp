#include <iostream>

#include "dermveil_app/cli.hpp"

int main(int argc, char** argv) {
  return dermveil::app::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
