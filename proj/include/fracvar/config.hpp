#pragma once

// INI-style problem configs. Sections: [problem], [orders], [lagrangian],
// [trajectory], [grid], [tolerances], [operator]. Expression values may be
// wrapped in double quotes. Errors name the offending section and key.

#include <optional>
#include <string>
#include <vector>

#include "fracvar/classic.hpp"
#include "fracvar/herglotz.hpp"
#include "fracvar/multidim.hpp"

namespace fracvar::config {

enum class Kind { Herglotz, Classic, Multidim, Operator };

std::string kind_name(Kind k);

struct SpaceAxis {
  double a = 0.0, b = 1.0;
  int n = 100;
  std::string alpha, beta;
  double gamma1 = 0.0, gamma2 = 0.0;
};

struct ProblemConfig {
  Kind kind = Kind::Herglotz;
  double a = 0.0, b = 1.0;
  int n = 1000;

  std::string alpha, beta;
  double gamma1 = 0.0, gamma2 = 0.0;

  std::string lagrangian;
  std::string phi = "0";  // classic terminal cost in (T, xT)
  double fd_step = 1e-6;

  std::string x;  // candidate trajectory
  std::string y;  // second trajectory for ibp-check

  double x_a = 0.0, z_a = 0.0;
  std::optional<double> T;  // absent = auto

  std::string op;  // operator kind: left-caputo, right-caputo, ...

  double tol = 5e-3;
  double root_tol = 1e-8;

  // multidim extras
  std::vector<SpaceAxis> space;
  std::string boundary = "0";
};

// Parses and validates (expressions parse, variable sets fit their slots,
// grids >= 2, orders inside (0,1) on the validation lattice).
ProblemConfig load_problem(const std::string& path);
ProblemConfig parse_config(std::string_view text,
                           const std::string& origin = "<string>");

herglotz::HerglotzProblem make_herglotz(const ProblemConfig& cfg);
classic::ClassicProblem make_classic(const ProblemConfig& cfg);
multidim::MultiProblem make_multidim(const ProblemConfig& cfg);

// Trajectory samples for the 1-D kinds / the multidim field.
GridFunction make_trajectory(const ProblemConfig& cfg, const std::string& src);
multidim::Field make_field(const ProblemConfig& cfg, const std::string& src);

}  // namespace fracvar::config
