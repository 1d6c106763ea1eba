#include <iostream>

#include "funcert/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return funcert::run(args, std::cout, std::cerr);
}
