#ifndef GLIAISON_CLI_HPP
#define GLIAISON_CLI_HPP

#include <string>
#include <vector>

namespace gliaison {

struct CliResult {
  int exit_code = 0;   // 0 success, 1 verification failure, 2 usage error
  std::string out;     // report (stdout)
  std::string err;     // diagnostics (stderr)
};

// full front end, testable in-process; argv excludes the program name
CliResult run_cli(const std::vector<std::string>& argv);

}  // namespace gliaison

#endif
