#pragma once

// The free-terminal-time functional
//   J(x, T) = int_a^T L(t, x, v) dt + phi(T, x(T))
// together with its Euler-Lagrange and transversality residuals. The
// assembly mirrors the Herglotz residuals with lambda replaced by 1 and a
// three-argument Lagrangian.

#include <string>

#include "fracvar/expr.hpp"
#include "fracvar/fracops.hpp"
#include "fracvar/grid.hpp"
#include "fracvar/order.hpp"

namespace fracvar::classic {

using fracops::Exec;

// L(t, x, v); partials by central differences as in the Herglotz case.
class Lagrangian3 {
 public:
  Lagrangian3() = default;
  explicit Lagrangian3(dsl::ExprPtr expr, double fd_step = 1e-6);
  explicit Lagrangian3(const std::string& src, double fd_step = 1e-6);

  double operator()(double t, double x, double v) const;
  double d_x(double t, double x, double v) const;
  double d_v(double t, double x, double v) const;

  double fd_step() const { return fd_step_; }
  const dsl::ExprPtr& expr() const { return expr_; }

 private:
  double partial(int slot, double t, double x, double v) const;

  dsl::ExprPtr expr_;
  dsl::CompiledExpr compiled_;
  double fd_step_ = 1e-6;
};

// Terminal cost phi(T, xT).
class TerminalCost {
 public:
  TerminalCost() = default;
  explicit TerminalCost(dsl::ExprPtr expr, double fd_step = 1e-6);
  explicit TerminalCost(const std::string& src, double fd_step = 1e-6);

  double operator()(double T, double xT) const;
  double d_T(double T, double xT) const;
  double d_xT(double T, double xT) const;

 private:
  double partial(int slot, double T, double xT) const;

  dsl::ExprPtr expr_;
  dsl::CompiledExpr compiled_;
  double fd_step_ = 1e-6;
};

struct ClassicProblem {
  ClassicProblem(Grid grid, CombinedSpec spec, Lagrangian3 lagrangian,
                 TerminalCost terminal_cost, double x_a);

  Grid grid;
  CombinedSpec spec;
  Lagrangian3 lagrangian;
  TerminalCost terminal_cost;
  double x_a;
};

// Trapezoid integral of L over [a,T] plus phi(T, x(T)); T must be a node.
double eval_functional(const ClassicProblem& p, const GridFunction& x,
                       double T);

// Interior residual dL/dx + dual(dL/dv) on [a,T] and the gamma2-scaled tail
// on [T,b]. Both are stored on the problem grid with zeros outside their
// range, as in the Herglotz module.
struct ElResiduals {
  GridFunction interior;
  GridFunction tail;
};
ElResiduals classic_el_residuals(const ClassicProblem& p, const GridFunction& x,
                                 double T, Exec exec = Exec::Parallel);

enum class TransversalityForm { Teo1, Teo2 };

// The three transversality lines. The bracket of RL integrals at t = T is
// evaluated at the node itself (zero-width integrals), as in the Herglotz
// module. Teo2 folds the bracket into the first line through x'(T).
struct ClassicTransversality {
  double line1 = 0.0;
  double line2 = 0.0;
  double line3 = 0.0;
};
ClassicTransversality classic_transversality(
    const ClassicProblem& p, const GridFunction& x, double T,
    TransversalityForm form = TransversalityForm::Teo1);

}  // namespace fracvar::classic
