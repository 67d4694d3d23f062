#include "fracvar/fracops.hpp"

#include <cmath>

#include "fracvar/gamma.hpp"
#include "fracvar/threads.hpp"

namespace fracvar::fracops {

namespace {

bool all_zero(const GridFunction& g) {
  for (double v : g.values()) {
    if (v != 0.0) return false;
  }
  return true;
}

template <class F>
void for_nodes(int lo, int hi, Exec exec, F&& f) {
  if (exec == Exec::Parallel) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(static, 16) num_threads(fracvar::max_threads())
#endif
    for (int i = lo; i <= hi; ++i) f(i);
  } else {
    for (int i = lo; i <= hi; ++i) f(i);
  }
}

// 2nd-order derivative stencil on the samples F over [lo, hi], one-sided at
// the range ends. Difference forms keep constants at exactly zero. Ranges
// with a single subinterval fall back to the two-point slope.
double fd_stencil(const std::vector<double>& F, double h, int i, int lo,
                  int hi) {
  if (hi - lo < 2) {
    return (F[static_cast<std::size_t>(hi)] - F[static_cast<std::size_t>(lo)]) / h;
  }
  if (i > lo && i < hi) {
    return (F[static_cast<std::size_t>(i + 1)] -
            F[static_cast<std::size_t>(i - 1)]) /
           (2.0 * h);
  }
  if (i == lo) {
    double d1 = F[static_cast<std::size_t>(lo + 1)] - F[static_cast<std::size_t>(lo)];
    double d2 = F[static_cast<std::size_t>(lo + 2)] - F[static_cast<std::size_t>(lo)];
    return (4.0 * d1 - d2) / (2.0 * h);
  }
  double d1 = F[static_cast<std::size_t>(hi)] - F[static_cast<std::size_t>(hi - 1)];
  double d2 = F[static_cast<std::size_t>(hi)] - F[static_cast<std::size_t>(hi - 2)];
  return (4.0 * d1 - d2) / (2.0 * h);
}

int checked_index(const GridFunction& x, double t) {
  return x.grid().index_of(t);
}

void check_domain(const GridFunction& x, const OrderFunction& o) {
  if (x.grid().a != o.a() || x.grid().b != o.b()) {
    throw OrderError("order function domain does not match the grid");
  }
}

}  // namespace

PowTable PowTable::build(double q, double h, int len) {
  PowTable t;
  t.q = q;
  t.p.resize(static_cast<std::size_t>(len) + 1);
  t.p1.resize(static_cast<std::size_t>(len) + 1);
  for (int k = 0; k <= len; ++k) {
    t.p[static_cast<std::size_t>(k)] = std::pow(h * k, q);
    t.p1[static_cast<std::size_t>(k)] = std::pow(h * k, q + 1.0);
  }
  return t;
}

double left_conv_at(const GridFunction& g, const KernelOrder& q, int lo, int i,
                    const PowTable* table) {
  if (i <= lo) return 0.0;
  const Grid& gr = g.grid();
  const double h = gr.h();
  const double ti = gr.node(i);
  double acc = 0.0;
  if (table != nullptr) {
    const double invq = 1.0 / table->q;
    const double invq1 = 1.0 / (table->q + 1.0);
    const double invgamma = 1.0 / gamma_fn(table->q);
    for (int j = lo; j < i; ++j) {
      const int k = i - j;
      const double u0 = h * k;
      const double m0 = (table->p[static_cast<std::size_t>(k)] -
                         table->p[static_cast<std::size_t>(k - 1)]) *
                        invq;
      const double m1 = u0 * m0 - (table->p1[static_cast<std::size_t>(k)] -
                                   table->p1[static_cast<std::size_t>(k - 1)]) *
                                      invq1;
      const double slope = (g[j + 1] - g[j]) / h;
      acc += (g[j] * m0 + slope * m1) * invgamma;
    }
    return acc;
  }
  for (int j = lo; j < i; ++j) {
    const int k = i - j;
    const double u0 = h * k;
    const double u1 = h * (k - 1);
    const double mid = 0.5 * (gr.node(j) + gr.node(j + 1));
    const double p = q(ti, mid);
    // same reciprocal-multiply structure as the table path, so constant
    // orders evaluate bit-identically with and without a table
    const double m0 = (std::pow(u0, p) - std::pow(u1, p)) * (1.0 / p);
    const double m1 = u0 * m0 - (std::pow(u0, p + 1.0) - std::pow(u1, p + 1.0)) *
                                    (1.0 / (p + 1.0));
    const double slope = (g[j + 1] - g[j]) / h;
    acc += (g[j] * m0 + slope * m1) * (1.0 / gamma_fn(p));
  }
  return acc;
}

double right_conv_at(const GridFunction& g, const KernelOrder& q, int i,
                     int hi, const PowTable* table) {
  if (i >= hi) return 0.0;
  const Grid& gr = g.grid();
  const double h = gr.h();
  const double ti = gr.node(i);
  double acc = 0.0;
  if (table != nullptr) {
    const double invq = 1.0 / table->q;
    const double invq1 = 1.0 / (table->q + 1.0);
    const double invgamma = 1.0 / gamma_fn(table->q);
    for (int j = i; j < hi; ++j) {
      const int k = j - i;  // u runs over [k h, (k+1) h]
      const double ulo = h * k;
      const double m0 = (table->p[static_cast<std::size_t>(k + 1)] -
                         table->p[static_cast<std::size_t>(k)]) *
                        invq;
      const double m1 = (table->p1[static_cast<std::size_t>(k + 1)] -
                         table->p1[static_cast<std::size_t>(k)]) *
                            invq1 -
                        ulo * m0;
      const double slope = (g[j + 1] - g[j]) / h;
      acc += (g[j] * m0 + slope * m1) * invgamma;
    }
    return acc;
  }
  for (int j = i; j < hi; ++j) {
    const int k = j - i;
    const double ulo = h * k;
    const double uhi = h * (k + 1);
    const double mid = 0.5 * (gr.node(j) + gr.node(j + 1));
    const double p = q(mid, ti);
    const double m0 = (std::pow(uhi, p) - std::pow(ulo, p)) * (1.0 / p);
    const double m1 = (std::pow(uhi, p + 1.0) - std::pow(ulo, p + 1.0)) *
                          (1.0 / (p + 1.0)) -
                      ulo * m0;
    const double slope = (g[j + 1] - g[j]) / h;
    acc += (g[j] * m0 + slope * m1) * (1.0 / gamma_fn(p));
  }
  return acc;
}

std::vector<double> left_conv_profile(const GridFunction& g,
                                      const KernelOrder& q, int lo, int hi,
                                      Exec exec) {
  std::vector<double> out(static_cast<std::size_t>(g.grid().n) + 1, 0.0);
  if (all_zero(g)) return out;
  PowTable table;
  const PowTable* tp = nullptr;
  if (auto c = q.constant_value()) {
    table = PowTable::build(*c, g.grid().h(), hi - lo);
    tp = &table;
  }
  for_nodes(lo, hi, exec, [&](int i) {
    out[static_cast<std::size_t>(i)] = left_conv_at(g, q, lo, i, tp);
  });
  return out;
}

std::vector<double> right_conv_profile(const GridFunction& g,
                                       const KernelOrder& q, int lo, int hi,
                                       Exec exec) {
  std::vector<double> out(static_cast<std::size_t>(g.grid().n) + 1, 0.0);
  if (all_zero(g)) return out;
  PowTable table;
  const PowTable* tp = nullptr;
  if (auto c = q.constant_value()) {
    table = PowTable::build(*c, g.grid().h(), hi - lo);
    tp = &table;
  }
  for_nodes(lo, hi, exec, [&](int i) {
    out[static_cast<std::size_t>(i)] = right_conv_at(g, q, i, hi, tp);
  });
  return out;
}

// ---- per-node operators ----

double left_rl_integral(const GridFunction& x, const OrderFunction& alpha,
                        double t) {
  check_domain(x, alpha);
  int i = checked_index(x, t);
  return left_conv_at(x, KernelOrder{&alpha, false}, 0, i);
}

double right_rl_integral(const GridFunction& x, const OrderFunction& alpha,
                         double t) {
  check_domain(x, alpha);
  int i = checked_index(x, t);
  return right_conv_at(x, KernelOrder{&alpha, false}, i, x.grid().n);
}

double left_caputo(const GridFunction& x, const OrderFunction& alpha,
                   double t) {
  check_domain(x, alpha);
  int i = checked_index(x, t);
  if (i == 0) return 0.0;
  GridFunction dx = derivative(x);
  return left_conv_at(dx, KernelOrder{&alpha, true}, 0, i);
}

double right_caputo(const GridFunction& x, const OrderFunction& beta,
                    double t) {
  check_domain(x, beta);
  int i = checked_index(x, t);
  const int n = x.grid().n;
  if (i == n) return 0.0;
  GridFunction dx = derivative(x);
  return -right_conv_at(dx, KernelOrder{&beta, true}, i, n);
}

double left_rl_deriv(const GridFunction& x, const OrderFunction& alpha,
                     double t) {
  check_domain(x, alpha);
  const Grid& g = x.grid();
  int i = checked_index(x, t);
  KernelOrder q{&alpha, true};
  int jlo = (i == 0) ? 0 : (i == g.n ? g.n - 2 : i - 1);
  int jhi = (i == 0) ? 2 : (i == g.n ? g.n : i + 1);
  std::vector<double> F(static_cast<std::size_t>(g.n) + 1, 0.0);
  for (int j = jlo; j <= jhi; ++j) {
    F[static_cast<std::size_t>(j)] = left_conv_at(x, q, 0, j);
  }
  return fd_stencil(F, g.h(), i, 0, g.n);
}

double right_rl_deriv(const GridFunction& x, const OrderFunction& beta,
                      double t) {
  check_domain(x, beta);
  const Grid& g = x.grid();
  int i = checked_index(x, t);
  KernelOrder q{&beta, true};
  int jlo = (i == 0) ? 0 : (i == g.n ? g.n - 2 : i - 1);
  int jhi = (i == 0) ? 2 : (i == g.n ? g.n : i + 1);
  std::vector<double> G(static_cast<std::size_t>(g.n) + 1, 0.0);
  for (int j = jlo; j <= jhi; ++j) {
    G[static_cast<std::size_t>(j)] = right_conv_at(x, q, j, g.n);
  }
  return -fd_stencil(G, g.h(), i, 0, g.n);
}

double combined_caputo(const GridFunction& x, const CombinedSpec& spec,
                       double t) {
  return spec.gamma1 * left_caputo(x, spec.alpha, t) +
         spec.gamma2 * right_caputo(x, spec.beta, t);
}

double dual_rl(const GridFunction& y, const CombinedSpec& spec, double T,
               double t) {
  const Grid& g = y.grid();
  int iT = g.index_of(T);
  int i = g.index_of(t);
  if (i >= iT) {
    throw GridError("dual_rl: requires t < T");
  }
  GridFunction prof = dual_rl_profile(y, spec, iT, Exec::Serial);
  return prof[i];
}

double ibp_residual(const GridFunction& x, const GridFunction& y,
                    const OrderFunction& alpha, IbpSide side) {
  if (!(x.grid() == y.grid())) {
    throw GridError("ibp_residual: x and y live on different grids");
  }
  check_domain(x, alpha);
  const Grid& g = x.grid();
  const int n = g.n;
  if (side == IbpSide::LeftCaputo) {
    GridFunction cd = left_caputo_profile(x, alpha, Exec::Serial);
    GridFunction rd = right_rl_deriv_profile(y, alpha, n, Exec::Serial);
    std::vector<double> ri =
        right_conv_profile(y, KernelOrder{&alpha, true}, 0, n, Exec::Serial);
    std::vector<double> lhs_vals(cd.values()), rhs_vals(rd.values());
    for (int j = 0; j <= n; ++j) {
      lhs_vals[static_cast<std::size_t>(j)] *= y[j];
      rhs_vals[static_cast<std::size_t>(j)] *= x[j];
    }
    double lhs = trapezoid(GridFunction(g, std::move(lhs_vals)));
    double rhs = trapezoid(GridFunction(g, std::move(rhs_vals)));
    double bracket = x[n] * ri[static_cast<std::size_t>(n)] -
                     x[0] * ri[static_cast<std::size_t>(0)];
    return std::fabs(lhs - rhs - bracket);
  }
  GridFunction cd = right_caputo_profile(x, alpha, Exec::Serial);
  GridFunction ld = left_rl_deriv_profile(y, alpha, 0, Exec::Serial);
  std::vector<double> li =
      left_conv_profile(y, KernelOrder{&alpha, true}, 0, n, Exec::Serial);
  std::vector<double> lhs_vals(cd.values()), rhs_vals(ld.values());
  for (int j = 0; j <= n; ++j) {
    lhs_vals[static_cast<std::size_t>(j)] *= y[j];
    rhs_vals[static_cast<std::size_t>(j)] *= x[j];
  }
  double lhs = trapezoid(GridFunction(g, std::move(lhs_vals)));
  double rhs = trapezoid(GridFunction(g, std::move(rhs_vals)));
  double bracket = x[n] * li[static_cast<std::size_t>(n)] -
                   x[0] * li[static_cast<std::size_t>(0)];
  return std::fabs(lhs - rhs + bracket);
}

// ---- profiles ----

GridFunction left_caputo_profile(const GridFunction& x,
                                 const OrderFunction& alpha, Exec exec) {
  check_domain(x, alpha);
  GridFunction dx = derivative(x);
  std::vector<double> v =
      left_conv_profile(dx, KernelOrder{&alpha, true}, 0, x.grid().n, exec);
  return GridFunction(x.grid(), std::move(v));
}

GridFunction right_caputo_profile(const GridFunction& x,
                                  const OrderFunction& beta, Exec exec) {
  check_domain(x, beta);
  GridFunction dx = derivative(x);
  std::vector<double> v =
      right_conv_profile(dx, KernelOrder{&beta, true}, 0, x.grid().n, exec);
  for (double& w : v) w = -w;
  return GridFunction(x.grid(), std::move(v));
}

GridFunction caputo_profile(const GridFunction& x, const CombinedSpec& spec,
                            Exec exec) {
  GridFunction left = left_caputo_profile(x, spec.alpha, exec);
  GridFunction right = right_caputo_profile(x, spec.beta, exec);
  std::vector<double> v(static_cast<std::size_t>(x.grid().n) + 1);
  for (int j = 0; j <= x.grid().n; ++j) {
    v[static_cast<std::size_t>(j)] = spec.gamma1 * left[j] + spec.gamma2 * right[j];
  }
  return GridFunction(x.grid(), std::move(v));
}

GridFunction left_rl_deriv_profile(const GridFunction& x,
                                   const OrderFunction& alpha, int lo,
                                   Exec exec) {
  check_domain(x, alpha);
  const Grid& g = x.grid();
  const int n = g.n;
  std::vector<double> F =
      left_conv_profile(x, KernelOrder{&alpha, true}, lo, n, exec);
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = lo; i <= n; ++i) {
    out[static_cast<std::size_t>(i)] = fd_stencil(F, g.h(), i, lo, n);
  }
  return GridFunction(g, std::move(out));
}

GridFunction right_rl_deriv_profile(const GridFunction& x,
                                    const OrderFunction& beta, int hi,
                                    Exec exec) {
  check_domain(x, beta);
  const Grid& g = x.grid();
  std::vector<double> G =
      right_conv_profile(x, KernelOrder{&beta, true}, 0, hi, exec);
  std::vector<double> out(static_cast<std::size_t>(g.n) + 1, 0.0);
  for (int i = 0; i <= hi; ++i) {
    out[static_cast<std::size_t>(i)] = -fd_stencil(G, g.h(), i, 0, hi);
  }
  return GridFunction(g, std::move(out));
}

GridFunction dual_rl_profile(const GridFunction& y, const CombinedSpec& spec,
                             int iT, Exec exec) {
  const Grid& g = y.grid();
  check_domain(y, spec.alpha);
  check_domain(y, spec.beta);
  if (iT < 1 || iT > g.n) {
    throw GridError("dual_rl: upper limit node out of range");
  }
  // Left part gets order beta and weight gamma2; right part order alpha,
  // weight gamma1, with upper limit T.
  std::vector<double> out(static_cast<std::size_t>(g.n) + 1, 0.0);
  if (spec.gamma2 != 0.0) {
    std::vector<double> F =
        left_conv_profile(y, KernelOrder{&spec.beta, true}, 0,
                          std::min(g.n, iT + 1), exec);
    for (int i = 0; i <= iT; ++i) {
      out[static_cast<std::size_t>(i)] +=
          spec.gamma2 * fd_stencil(F, g.h(), i, 0, std::min(g.n, iT + 1));
    }
  }
  if (spec.gamma1 != 0.0) {
    std::vector<double> G =
        right_conv_profile(y, KernelOrder{&spec.alpha, true}, 0, iT, exec);
    for (int i = 0; i <= iT; ++i) {
      out[static_cast<std::size_t>(i)] -=
          spec.gamma1 * fd_stencil(G, g.h(), i, 0, iT);
    }
  }
  return GridFunction(g, std::move(out));
}

}  // namespace fracvar::fracops
