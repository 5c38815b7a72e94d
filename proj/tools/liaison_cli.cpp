#include <iostream>
#include <vector>

#include "gliaison/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  gliaison::CliResult r = gliaison::run_cli(args);
  if (!r.out.empty()) std::cout << r.out;
  if (!r.err.empty()) std::cerr << r.err;
  return r.exit_code;
}
