#pragma once

// Command implementations behind the fracvar binary. They are plain
// functions so the test suites can drive them without spawning processes.
// Exit codes: 0 all checks passed, 1 verification failed, 2 config or
// compute error.

#include <iosfwd>
#include <string>

#include "fracvar/config.hpp"

namespace fracvar::cli {

struct Options {
  std::string config_path;
  std::string out_path;  // report destination ("" = stdout)
  std::string csv_path;  // profile CSV destination ("" = none/default)
  double tol = 5e-3;
  bool tol_given = false;
  int grid_override = 0;  // 0 = use config n
  bool json = false;
};

// Built-in reproductions of the three worked examples; names ex1..ex3.
const char* example_fixture(const std::string& name);

int cmd_deriv(config::ProblemConfig cfg, const Options& opt, std::ostream& out);
int cmd_verify(config::ProblemConfig cfg, const Options& opt, std::ostream& out);
int cmd_solve_t(config::ProblemConfig cfg, const Options& opt, std::ostream& out);
int cmd_example(const std::string& name, const Options& opt, std::ostream& out);
int cmd_ibp_check(config::ProblemConfig cfg, const Options& opt,
                  std::ostream& out);

// Full argv dispatch used by main(); catches everything and maps errors to
// exit code 2.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fracvar::cli
