#include "fracvar/herglotz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fracvar::herglotz {

using fracops::KernelOrder;

Lagrangian::Lagrangian(dsl::ExprPtr expr, double fd_step)
    : expr_(std::move(expr)),
      compiled_(expr_, {"t", "x", "v", "z"}),
      fd_step_(fd_step) {}

Lagrangian::Lagrangian(const std::string& src, double fd_step)
    : Lagrangian(dsl::parse(src), fd_step) {}

double Lagrangian::operator()(double t, double x, double v, double z) const {
  double args[4] = {t, x, v, z};
  return compiled_(args);
}

double Lagrangian::partial(int slot, double t, double x, double v,
                           double z) const {
  double args[4] = {t, x, v, z};
  const double step = fd_step_ * std::max(1.0, std::fabs(args[slot]));
  double hi[4] = {t, x, v, z};
  double lo[4] = {t, x, v, z};
  hi[slot] += step;
  lo[slot] -= step;
  return (compiled_(hi) - compiled_(lo)) / (2.0 * step);
}

double Lagrangian::d_x(double t, double x, double v, double z) const {
  return partial(1, t, x, v, z);
}
double Lagrangian::d_v(double t, double x, double v, double z) const {
  return partial(2, t, x, v, z);
}
double Lagrangian::d_z(double t, double x, double v, double z) const {
  return partial(3, t, x, v, z);
}

HerglotzProblem::HerglotzProblem(Grid grid_, CombinedSpec spec_,
                                 Lagrangian lagrangian_, double x_a_,
                                 double z_a_)
    : grid(grid_),
      spec(std::move(spec_)),
      lagrangian(std::move(lagrangian_)),
      x_a(x_a_),
      z_a(z_a_) {
  if (grid.a != spec.alpha.a() || grid.b != spec.alpha.b()) {
    throw OrderError("problem grid and order functions must share [a,b]");
  }
  if (!std::isfinite(x_a) || !std::isfinite(z_a)) {
    throw Error("x_a and z_a must be finite");
  }
}

GridFunction caputo_profile(const HerglotzProblem& p, const GridFunction& x,
                            Exec exec) {
  return fracops::caputo_profile(x, p.spec, exec);
}

GridFunction solve_z(const HerglotzProblem& p, const GridFunction& x,
                     const GridFunction& v) {
  if (std::fabs(x[0] - p.x_a) > 1e-12) {
    throw GridError("solve_z: trajectory does not satisfy x(a) = x_a");
  }
  const Grid& g = p.grid;
  const double h = g.h();
  std::vector<double> z(static_cast<std::size_t>(g.n) + 1);
  z[0] = p.z_a;
  auto rhs = [&](double t, double zv) {
    double val = p.lagrangian(t, x.value_at(t), v.value_at(t), zv);
    if (!std::isfinite(val)) {
      throw Error("solve_z: non-finite Lagrangian at t = " + std::to_string(t));
    }
    return val;
  };
  for (int k = 0; k < g.n; ++k) {
    const double t = g.node(k);
    const double zk = z[static_cast<std::size_t>(k)];
    const double k1 = rhs(t, zk);
    const double k2 = rhs(t + 0.5 * h, zk + 0.5 * h * k1);
    const double k3 = rhs(t + 0.5 * h, zk + 0.5 * h * k2);
    const double k4 = rhs(t + h, zk + h * k3);
    z[static_cast<std::size_t>(k) + 1] =
        zk + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return GridFunction(g, std::move(z));
}

GridFunction solve_z(const HerglotzProblem& p, const GridFunction& x) {
  return solve_z(p, x, caputo_profile(p, x));
}

GridFunction lambda_profile(const HerglotzProblem& p, const GridFunction& x,
                            const GridFunction& v, const GridFunction& z) {
  const Grid& g = p.grid;
  std::vector<double> d4(static_cast<std::size_t>(g.n) + 1);
  for (int j = 0; j <= g.n; ++j) {
    double val = p.lagrangian.d_z(g.node(j), x[j], v[j], z[j]);
    if (!std::isfinite(val)) {
      throw Error("lambda: non-finite dL/dz at t = " + std::to_string(g.node(j)));
    }
    d4[static_cast<std::size_t>(j)] = val;
  }
  std::vector<double> lam(static_cast<std::size_t>(g.n) + 1);
  double cum = 0.0;
  lam[0] = 1.0;
  for (int j = 1; j <= g.n; ++j) {
    cum += 0.5 * g.h() * (d4[static_cast<std::size_t>(j - 1)] +
                          d4[static_cast<std::size_t>(j)]);
    lam[static_cast<std::size_t>(j)] = std::exp(-cum);
  }
  return GridFunction(g, std::move(lam));
}

GridFunction lambda_profile(const HerglotzProblem& p, const GridFunction& x,
                            const GridFunction& z) {
  return lambda_profile(p, x, caputo_profile(p, x), z);
}

namespace {

// lambda(t) dL/dv along the trajectory.
GridFunction weighted_dv(const HerglotzProblem& p, const GridFunction& x,
                         const GridFunction& v, const GridFunction& z,
                         const GridFunction& lambda) {
  const Grid& g = p.grid;
  std::vector<double> w(static_cast<std::size_t>(g.n) + 1);
  for (int j = 0; j <= g.n; ++j) {
    w[static_cast<std::size_t>(j)] =
        lambda[j] * p.lagrangian.d_v(g.node(j), x[j], v[j], z[j]);
  }
  return GridFunction(g, std::move(w));
}

}  // namespace

GridFunction el_residual_interior(const HerglotzProblem& p,
                                  const GridFunction& x, const GridFunction& v,
                                  const GridFunction& z,
                                  const GridFunction& lambda, double T,
                                  Exec exec) {
  const Grid& g = p.grid;
  const int iT = g.index_of(T);
  GridFunction w = weighted_dv(p, x, v, z, lambda);
  GridFunction dual = fracops::dual_rl_profile(w, p.spec, iT, exec);
  std::vector<double> res(static_cast<std::size_t>(g.n) + 1, 0.0);
  for (int j = 0; j <= iT; ++j) {
    res[static_cast<std::size_t>(j)] =
        p.lagrangian.d_x(g.node(j), x[j], v[j], z[j]) * lambda[j] + dual[j];
  }
  return GridFunction(g, std::move(res));
}

GridFunction el_residual_interior(const HerglotzProblem& p,
                                  const GridFunction& x, const GridFunction& z,
                                  const GridFunction& lambda, double T) {
  return el_residual_interior(p, x, caputo_profile(p, x), z, lambda, T,
                              Exec::Parallel);
}

GridFunction el_residual_tail(const HerglotzProblem& p, const GridFunction& x,
                              const GridFunction& v, const GridFunction& z,
                              const GridFunction& lambda, double T, Exec exec) {
  const Grid& g = p.grid;
  const int iT = g.index_of(T);
  std::vector<double> res(static_cast<std::size_t>(g.n) + 1, 0.0);
  if (p.spec.gamma2 == 0.0 || iT >= g.n) {
    // Vacuous when the tail interval collapses or gamma2 kills the term.
    return GridFunction(g, std::move(res));
  }
  GridFunction w = weighted_dv(p, x, v, z, lambda);
  GridFunction from_a =
      fracops::left_rl_deriv_profile(w, p.spec.beta, 0, exec);
  GridFunction from_T =
      fracops::left_rl_deriv_profile(w, p.spec.beta, iT, exec);
  for (int j = iT; j <= g.n; ++j) {
    res[static_cast<std::size_t>(j)] =
        p.spec.gamma2 * (from_a[j] - from_T[j]);
  }
  return GridFunction(g, std::move(res));
}

GridFunction el_residual_tail(const HerglotzProblem& p, const GridFunction& x,
                              const GridFunction& z, const GridFunction& lambda,
                              double T) {
  return el_residual_tail(p, x, caputo_profile(p, x), z, lambda, T,
                          Exec::Parallel);
}

Transversality transversality(const HerglotzProblem& p, const GridFunction& x,
                              const GridFunction& v, const GridFunction& z,
                              const GridFunction& lambda, double T) {
  const Grid& g = p.grid;
  const int iT = g.index_of(T);
  GridFunction w = weighted_dv(p, x, v, z, lambda);
  KernelOrder qa{&p.spec.alpha, true};
  KernelOrder qb{&p.spec.beta, true};
  Transversality out;
  // [gamma1 I_{t->T}^{1-alpha} w - gamma2 I_{T->t}^{1-beta} w] at t = T;
  // both integrals have zero width there.
  out.at_T = p.spec.gamma1 * fracops::right_conv_at(w, qa, iT, iT) -
             p.spec.gamma2 * fracops::left_conv_at(w, qb, iT, iT);
  // gamma2 [ I_{T->t}^{1-beta} w - I_{a->t}^{1-beta} w ] at t = b.
  out.at_b = p.spec.gamma2 * (fracops::left_conv_at(w, qb, iT, g.n) -
                              fracops::left_conv_at(w, qb, 0, g.n));
  out.lagrangian_at_T = p.lagrangian(g.node(iT), x[iT], v[iT], z[iT]);
  return out;
}

Transversality transversality(const HerglotzProblem& p, const GridFunction& x,
                              const GridFunction& z, const GridFunction& lambda,
                              double T) {
  return transversality(p, x, caputo_profile(p, x), z, lambda, T);
}

namespace {

double lagrangian_along(const HerglotzProblem& p, const GridFunction& x,
                        const GridFunction& v, const GridFunction& z,
                        double t) {
  return p.lagrangian(t, x.value_at(t), v.value_at(t), z.value_at(t));
}

}  // namespace

TerminalTime find_terminal_time(const HerglotzProblem& p, const GridFunction& x,
                                double root_tol) {
  const Grid& g = p.grid;
  GridFunction v = caputo_profile(p, x);
  GridFunction z = solve_z(p, x, v);
  auto gfun = [&](double T) { return lagrangian_along(p, x, v, z, T); };

  std::vector<double> roots;
  double prev = gfun(g.node(0));
  if (prev == 0.0) roots.push_back(g.node(0));
  for (int j = 1; j <= g.n; ++j) {
    double cur = gfun(g.node(j));
    if (cur == 0.0) {
      roots.push_back(g.node(j));
    } else if (prev != 0.0 && (prev < 0.0) != (cur < 0.0)) {
      double lo = g.node(j - 1), hi = g.node(j), glo = prev;
      double mid = 0.5 * (lo + hi);
      for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        double gm = gfun(mid);
        if (std::fabs(gm) < root_tol || (hi - lo) < 1e-10) break;
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(mid);
    }
    prev = cur;
  }

  TerminalTime out;
  if (roots.empty()) {
    out.T = g.b;
    out.z_at_T = z[g.n];
    out.boundary = true;
    return out;
  }
  double best = roots.front();
  double best_z = z.value_at(best);
  for (double r : roots) {
    double zr = z.value_at(r);
    if (zr < best_z) {
      best = r;
      best_z = zr;
    }
  }
  out.T = best;
  out.z_at_T = best_z;
  return out;
}

VerificationReport verify(const HerglotzProblem& p, const GridFunction& x,
                          std::optional<double> T, double root_tol) {
  VerificationReport rep;
  if (p.spec.degenerate()) rep.flags.push_back("degenerate-gamma");
  try {
    GridFunction v = caputo_profile(p, x);
    GridFunction z = solve_z(p, x, v);
    GridFunction lambda = lambda_profile(p, x, v, z);

    double Tval;
    if (T) {
      Tval = *T;
      rep.z_at_T = z.value_at(Tval);
    } else {
      TerminalTime tt = find_terminal_time(p, x, root_tol);
      Tval = tt.T;
      rep.z_at_T = tt.z_at_T;
      if (tt.boundary) rep.flags.push_back("boundary");
    }
    rep.T = Tval;

    const Grid& g = p.grid;
    const int iT = static_cast<int>(
        std::lround((Tval - g.a) / (g.b - g.a) * g.n));
    const int iTc = std::max(1, std::min(g.n, iT));
    const double Tnode = g.node(iTc);

    GridFunction interior = el_residual_interior(p, x, v, z, lambda, Tnode);
    GridFunction tail = el_residual_tail(p, x, v, z, lambda, Tnode);
    for (int j = 0; j <= iTc; ++j) {
      rep.el_interior_norm = std::max(rep.el_interior_norm, std::fabs(interior[j]));
    }
    for (int j = iTc; j <= g.n; ++j) {
      rep.el_tail_norm = std::max(rep.el_tail_norm, std::fabs(tail[j]));
    }
    Transversality tr = transversality(p, x, v, z, lambda, Tnode);
    rep.trans_at_T = tr.at_T;
    rep.trans_at_b = tr.at_b;
    rep.lagrangian_at_T = lagrangian_along(p, x, v, z, Tval);
  } catch (const std::exception& e) {
    rep.flags.push_back(std::string("error: ") + e.what());
  }
  return rep;
}

}  // namespace fracvar::herglotz
