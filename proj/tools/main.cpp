#include <iostream>
#include <string>
#include <vector>

#include "minifs/cli.hpp"

int main(int argc, char* argv[]) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const int code = minifs::cli::run(args, std::cout, std::cerr);
  std::cout.flush();
  return code;
}
