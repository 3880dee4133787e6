#include <iostream>
#include <string>
#include <vector>

#include "psum/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return psum::run_cli(args, std::cout, std::cerr);
}
