#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace threelines::cli {

struct Check {
  std::string name;
  std::string target;
  double measured = 0;
  double tolerance = 0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<Check> checks;

  // pass when measured <= tolerance; NaN fails
  void add(std::string name, std::string target, double measured, double tolerance);
  bool pass() const;
  json to_json() const;
};

// Runs one command. The primary JSON result goes to out, diagnostics to err; files land in
// cfg.out_dir when it is set. Returns the process exit code.
int run_mode(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Full command line, argv[0] included.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace threelines::cli
