#pragma once

// Herglotz-type variational problems driven by the combined Caputo
// derivative: integrate the z-equation, build the lambda weight, evaluate
// the Euler-Lagrange and transversality residuals of a candidate
// trajectory, and locate the free terminal time.

#include <optional>
#include <string>
#include <vector>

#include "fracvar/expr.hpp"
#include "fracvar/fracops.hpp"
#include "fracvar/grid.hpp"
#include "fracvar/order.hpp"

namespace fracvar::herglotz {

using fracops::Exec;

// L(t, x, v, z) where v stands for the combined Caputo derivative of x.
// Partial derivatives use central differences with a relative step.
class Lagrangian {
 public:
  Lagrangian() = default;
  explicit Lagrangian(dsl::ExprPtr expr, double fd_step = 1e-6);
  explicit Lagrangian(const std::string& src, double fd_step = 1e-6);

  double operator()(double t, double x, double v, double z) const;
  double d_x(double t, double x, double v, double z) const;
  double d_v(double t, double x, double v, double z) const;
  double d_z(double t, double x, double v, double z) const;

  double fd_step() const { return fd_step_; }
  const dsl::ExprPtr& expr() const { return expr_; }

 private:
  double partial(int slot, double t, double x, double v, double z) const;

  dsl::ExprPtr expr_;
  dsl::CompiledExpr compiled_;
  double fd_step_ = 1e-6;
};

struct HerglotzProblem {
  HerglotzProblem(Grid grid, CombinedSpec spec, Lagrangian lagrangian,
                  double x_a, double z_a);

  Grid grid;
  CombinedSpec spec;
  Lagrangian lagrangian;
  double x_a;
  double z_a;
};

struct VerificationReport {
  double T = 0.0;
  double z_at_T = 0.0;
  double el_interior_norm = 0.0;
  double el_tail_norm = 0.0;
  double trans_at_T = 0.0;
  double trans_at_b = 0.0;
  double lagrangian_at_T = 0.0;
  std::vector<std::string> flags;
};

// Combined Caputo derivative of x on every node.
GridFunction caputo_profile(const HerglotzProblem& p, const GridFunction& x,
                            Exec exec = Exec::Parallel);

// Classical RK4 for z' = L(t, x, v, z), z(a) = z_a, with x and v linearly
// interpolated at the half steps. Requires x(a) = x_a within 1e-12.
GridFunction solve_z(const HerglotzProblem& p, const GridFunction& x,
                     const GridFunction& v);
GridFunction solve_z(const HerglotzProblem& p, const GridFunction& x);

// lambda(t) = exp(-int_a^t dL/dz) by cumulative trapezoid; lambda(a) = 1.
GridFunction lambda_profile(const HerglotzProblem& p, const GridFunction& x,
                            const GridFunction& v, const GridFunction& z);
GridFunction lambda_profile(const HerglotzProblem& p, const GridFunction& x,
                            const GridFunction& z);

// Residual of the first Euler-Lagrange equation,
//   dL/dx lambda + dual(lambda dL/dv),
// stored on the problem grid with values on nodes [a, T] (zero above).
GridFunction el_residual_interior(const HerglotzProblem& p,
                                  const GridFunction& x, const GridFunction& v,
                                  const GridFunction& z,
                                  const GridFunction& lambda, double T,
                                  Exec exec = Exec::Parallel);
GridFunction el_residual_interior(const HerglotzProblem& p,
                                  const GridFunction& x, const GridFunction& z,
                                  const GridFunction& lambda, double T);

// Residual of the second Euler-Lagrange equation on [T, b]:
//   gamma2 (leftRL_a - leftRL_T)(lambda dL/dv),
// stored on the problem grid with values on nodes [T, b] (zero below).
// Identically zero when T = b.
GridFunction el_residual_tail(const HerglotzProblem& p, const GridFunction& x,
                              const GridFunction& v, const GridFunction& z,
                              const GridFunction& lambda, double T,
                              Exec exec = Exec::Parallel);
GridFunction el_residual_tail(const HerglotzProblem& p, const GridFunction& x,
                              const GridFunction& z, const GridFunction& lambda,
                              double T);

struct Transversality {
  double at_T = 0.0;           // bracket of RL integrals at t = T
  double at_b = 0.0;           // gamma2 bracket at t = b
  double lagrangian_at_T = 0.0;  // L at (T, x(T), v(T), z(T))
};

// The RL-integral brackets are evaluated at the grid node itself, so the
// zero-width integrals at t = T contribute their one-sided limit 0.
Transversality transversality(const HerglotzProblem& p, const GridFunction& x,
                              const GridFunction& v, const GridFunction& z,
                              const GridFunction& lambda, double T);
Transversality transversality(const HerglotzProblem& p, const GridFunction& x,
                              const GridFunction& z, const GridFunction& lambda,
                              double T);

struct TerminalTime {
  double T = 0.0;
  double z_at_T = 0.0;
  bool boundary = false;  // no sign change; T = b returned
};

// Scans g(T) = L(T, x(T), v(T), z(T)) for sign changes over the nodes,
// bisects each bracket to |g| < root_tol or width < 1e-10, and returns the
// root with the smallest interpolated z(T).
TerminalTime find_terminal_time(const HerglotzProblem& p,
                                const GridFunction& x,
                                double root_tol = 1e-8);

// Full pipeline; T = nullopt delegates to find_terminal_time. Failures
// surface as "error: ..." flags rather than exceptions.
VerificationReport verify(const HerglotzProblem& p, const GridFunction& x,
                          std::optional<double> T = std::nullopt,
                          double root_tol = 1e-8);

}  // namespace fracvar::herglotz
