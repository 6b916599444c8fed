#include <iostream>
#include <string>
#include <vector>

#include "corpusforge/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return corpusforge::RunCli(args, std::cout, std::cerr);
}
