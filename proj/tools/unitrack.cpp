#include <iostream>
#include <string>
#include <vector>

#include "unitrack/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return unitrack::run_cli(args, std::cout, std::cerr);
}
