#include "fracvar/classic.hpp"

#include <cmath>

namespace fracvar::classic {

using fracops::KernelOrder;

Lagrangian3::Lagrangian3(dsl::ExprPtr expr, double fd_step)
    : expr_(std::move(expr)),
      compiled_(expr_, {"t", "x", "v"}),
      fd_step_(fd_step) {}

Lagrangian3::Lagrangian3(const std::string& src, double fd_step)
    : Lagrangian3(dsl::parse(src), fd_step) {}

double Lagrangian3::operator()(double t, double x, double v) const {
  double args[3] = {t, x, v};
  return compiled_(args);
}

double Lagrangian3::partial(int slot, double t, double x, double v) const {
  double args[3] = {t, x, v};
  const double step = fd_step_ * std::max(1.0, std::fabs(args[slot]));
  double hi[3] = {t, x, v};
  double lo[3] = {t, x, v};
  hi[slot] += step;
  lo[slot] -= step;
  return (compiled_(hi) - compiled_(lo)) / (2.0 * step);
}

double Lagrangian3::d_x(double t, double x, double v) const {
  return partial(1, t, x, v);
}
double Lagrangian3::d_v(double t, double x, double v) const {
  return partial(2, t, x, v);
}

TerminalCost::TerminalCost(dsl::ExprPtr expr, double fd_step)
    : expr_(std::move(expr)),
      compiled_(expr_, {"T", "xT"}),
      fd_step_(fd_step) {}

TerminalCost::TerminalCost(const std::string& src, double fd_step)
    : TerminalCost(dsl::parse(src), fd_step) {}

double TerminalCost::operator()(double T, double xT) const {
  double args[2] = {T, xT};
  return compiled_(args);
}

double TerminalCost::partial(int slot, double T, double xT) const {
  double args[2] = {T, xT};
  const double step = fd_step_ * std::max(1.0, std::fabs(args[slot]));
  double hi[2] = {T, xT};
  double lo[2] = {T, xT};
  hi[slot] += step;
  lo[slot] -= step;
  return (compiled_(hi) - compiled_(lo)) / (2.0 * step);
}

double TerminalCost::d_T(double T, double xT) const { return partial(0, T, xT); }
double TerminalCost::d_xT(double T, double xT) const { return partial(1, T, xT); }

ClassicProblem::ClassicProblem(Grid grid_, CombinedSpec spec_,
                               Lagrangian3 lagrangian_,
                               TerminalCost terminal_cost_, double x_a_)
    : grid(grid_),
      spec(std::move(spec_)),
      lagrangian(std::move(lagrangian_)),
      terminal_cost(std::move(terminal_cost_)),
      x_a(x_a_) {
  if (grid.a != spec.alpha.a() || grid.b != spec.alpha.b()) {
    throw OrderError("problem grid and order functions must share [a,b]");
  }
}

namespace {

GridFunction dv_profile(const ClassicProblem& p, const GridFunction& x,
                        const GridFunction& v) {
  const Grid& g = p.grid;
  std::vector<double> w(static_cast<std::size_t>(g.n) + 1);
  for (int j = 0; j <= g.n; ++j) {
    w[static_cast<std::size_t>(j)] = p.lagrangian.d_v(g.node(j), x[j], v[j]);
  }
  return GridFunction(g, std::move(w));
}

}  // namespace

double eval_functional(const ClassicProblem& p, const GridFunction& x,
                       double T) {
  const Grid& g = p.grid;
  const int iT = g.index_of(T);
  if (std::fabs(x[0] - p.x_a) > 1e-12) {
    throw GridError("eval_functional: trajectory does not satisfy x(a) = x_a");
  }
  GridFunction v = fracops::caputo_profile(x, p.spec);
  std::vector<double> lvals(static_cast<std::size_t>(g.n) + 1, 0.0);
  for (int j = 0; j <= iT; ++j) {
    lvals[static_cast<std::size_t>(j)] = p.lagrangian(g.node(j), x[j], v[j]);
  }
  double integral = trapezoid(GridFunction(g, std::move(lvals)), 0, iT);
  return integral + p.terminal_cost(g.node(iT), x[iT]);
}

ElResiduals classic_el_residuals(const ClassicProblem& p, const GridFunction& x,
                                 double T, Exec exec) {
  const Grid& g = p.grid;
  const int iT = g.index_of(T);
  GridFunction v = fracops::caputo_profile(x, p.spec, exec);
  GridFunction w = dv_profile(p, x, v);

  std::vector<double> interior(static_cast<std::size_t>(g.n) + 1, 0.0);
  GridFunction dual = fracops::dual_rl_profile(w, p.spec, iT, exec);
  for (int j = 0; j <= iT; ++j) {
    interior[static_cast<std::size_t>(j)] =
        p.lagrangian.d_x(g.node(j), x[j], v[j]) + dual[j];
  }

  std::vector<double> tail(static_cast<std::size_t>(g.n) + 1, 0.0);
  if (p.spec.gamma2 != 0.0 && iT < g.n) {
    GridFunction from_a = fracops::left_rl_deriv_profile(w, p.spec.beta, 0, exec);
    GridFunction from_T =
        fracops::left_rl_deriv_profile(w, p.spec.beta, iT, exec);
    for (int j = iT; j <= g.n; ++j) {
      tail[static_cast<std::size_t>(j)] =
          p.spec.gamma2 * (from_a[j] - from_T[j]);
    }
  }
  return {GridFunction(g, std::move(interior)), GridFunction(g, std::move(tail))};
}

ClassicTransversality classic_transversality(const ClassicProblem& p,
                                             const GridFunction& x, double T,
                                             TransversalityForm form) {
  const Grid& g = p.grid;
  const int iT = g.index_of(T);
  GridFunction v = fracops::caputo_profile(x, p.spec);
  GridFunction w = dv_profile(p, x, v);
  GridFunction dx = derivative(x);

  KernelOrder qa{&p.spec.alpha, true};
  KernelOrder qb{&p.spec.beta, true};
  const double bracket_T =
      p.spec.gamma1 * fracops::right_conv_at(w, qa, iT, iT) -
      p.spec.gamma2 * fracops::left_conv_at(w, qb, iT, iT);
  const double L_T = p.lagrangian(g.node(iT), x[iT], v[iT]);
  const double phi_T = p.terminal_cost.d_T(g.node(iT), x[iT]);
  const double phi_x = p.terminal_cost.d_xT(g.node(iT), x[iT]);
  const double xprime = dx[iT];

  ClassicTransversality out;
  if (form == TransversalityForm::Teo1) {
    out.line1 = L_T + phi_T + phi_x * xprime;
  } else {
    out.line1 = L_T + phi_T + xprime * (-bracket_T);
  }
  out.line2 = bracket_T + phi_x;
  out.line3 = p.spec.gamma2 * (fracops::left_conv_at(w, qb, iT, g.n) -
                               fracops::left_conv_at(w, qb, 0, g.n));
  return out;
}

}  // namespace fracvar::classic
