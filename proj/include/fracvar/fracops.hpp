#pragma once

// Variable-order fractional operators on uniform grids.
//
// All operators share one product-integration rule: on each subinterval the
// order is frozen at the midpoint, the smooth factor is interpolated
// linearly between its node samples, and the power kernel times the linear
// interpolant is integrated in closed form. This handles the integrable
// endpoint singularity without cutoffs and reduces to the classical
// L1-type scheme when the order is constant.
//
// Left-sided kernels evaluate the order at (t, tau), right-sided kernels at
// (tau, t), following the operator definitions. Riemann-Liouville
// derivatives difference the re-assembled inner integral with 2nd-order
// stencils (one-sided at range ends), so the dependence of the order on the
// outer variable is captured.
//
// The per-node functions below are the serial reference implementation;
// the *_profile functions evaluate whole node ranges and run the nodes in
// parallel with OpenMP (node results are bitwise identical either way).

#include <optional>
#include <vector>

#include "fracvar/grid.hpp"
#include "fracvar/order.hpp"

namespace fracvar::fracops {

enum class Exec { Serial, Parallel };

// Effective kernel order p in (0,1): the kernel is (.)^(p-1) / Gamma(p).
// Integral-type kernels use the order itself, derivative/Caputo kernels its
// complement 1 - order.
struct KernelOrder {
  const OrderFunction* order = nullptr;
  bool complement = false;

  double operator()(double first, double second) const {
    double v = (*order)(first, second);
    return complement ? 1.0 - v : v;
  }
  std::optional<double> constant_value() const {
    auto c = order->constant_value();
    if (!c) return std::nullopt;
    return complement ? 1.0 - *c : *c;
  }
};

// Precomputed powers for constant-order kernels: p[k] = (k h)^q and
// p1[k] = (k h)^(q+1).
struct PowTable {
  double q = 0.0;
  std::vector<double> p, p1;
  static PowTable build(double q, double h, int len);
};

// F(i) = integral over [t_lo, t_i] of (t_i - tau)^(q-1)/Gamma(q) g(tau) dtau.
// Zero when i <= lo.
double left_conv_at(const GridFunction& g, const KernelOrder& q, int lo, int i,
                    const PowTable* table = nullptr);

// G(i) = integral over [t_i, t_hi] of (tau - t_i)^(q-1)/Gamma(q) g(tau) dtau.
// Zero when i >= hi.
double right_conv_at(const GridFunction& g, const KernelOrder& q, int i,
                     int hi, const PowTable* table = nullptr);

// Whole-range versions; the returned vector is grid-sized with entries
// filled on [lo, hi] (left: F(j) with lower limit t_lo; right: G(j) with
// upper limit t_hi) and zeros elsewhere.
std::vector<double> left_conv_profile(const GridFunction& g,
                                      const KernelOrder& q, int lo, int hi,
                                      Exec exec = Exec::Parallel);
std::vector<double> right_conv_profile(const GridFunction& g,
                                       const KernelOrder& q, int lo, int hi,
                                       Exec exec = Exec::Parallel);

// ---- per-node operators (t must be a grid node) ----

double left_rl_integral(const GridFunction& x, const OrderFunction& alpha,
                        double t);
double right_rl_integral(const GridFunction& x, const OrderFunction& alpha,
                         double t);

// Caputo derivatives; x' comes from `derivative` (central differences,
// 2nd-order one-sided at the endpoints). Values at t = a (left) and t = b
// (right) are the natural zero-width limits.
double left_caputo(const GridFunction& x, const OrderFunction& alpha,
                   double t);
double right_caputo(const GridFunction& x, const OrderFunction& beta,
                    double t);

// Riemann-Liouville derivatives; one-sided stencils are used silently at
// t = a and t = b.
double left_rl_deriv(const GridFunction& x, const OrderFunction& alpha,
                     double t);
double right_rl_deriv(const GridFunction& x, const OrderFunction& beta,
                      double t);

// gamma1 * left Caputo(alpha) + gamma2 * right Caputo(beta).
double combined_caputo(const GridFunction& x, const CombinedSpec& spec,
                       double t);

// Dual Riemann-Liouville operator
//   gamma2 * (left RL derivative of order beta from a)
// + gamma1 * (right RL derivative of order alpha with upper limit T).
// Requires T a grid node and t < T.
double dual_rl(const GridFunction& y, const CombinedSpec& spec, double T,
               double t);

// Residual of the integration-by-parts identity. LeftCaputo checks
//   int y (left Caputo x) = int x (right RL deriv y) + [x (right RL
//   integral of order 1-alpha of y)] at b minus at a,
// RightCaputo the mirrored identity with the opposite bracket sign.
// All outer integrals use the trapezoid rule on the grid.
enum class IbpSide { LeftCaputo, RightCaputo };
double ibp_residual(const GridFunction& x, const GridFunction& y,
                    const OrderFunction& alpha,
                    IbpSide side = IbpSide::LeftCaputo);

// ---- whole-profile kernels (OpenMP over nodes) ----

GridFunction left_caputo_profile(const GridFunction& x,
                                 const OrderFunction& alpha,
                                 Exec exec = Exec::Parallel);
GridFunction right_caputo_profile(const GridFunction& x,
                                  const OrderFunction& beta,
                                  Exec exec = Exec::Parallel);
GridFunction caputo_profile(const GridFunction& x, const CombinedSpec& spec,
                            Exec exec = Exec::Parallel);

// Left RL derivative with lower limit node `lo`; valid on [lo, n].
GridFunction left_rl_deriv_profile(const GridFunction& x,
                                   const OrderFunction& alpha, int lo,
                                   Exec exec = Exec::Parallel);
// Right RL derivative with upper limit node `hi`; valid on [0, hi].
GridFunction right_rl_deriv_profile(const GridFunction& x,
                                    const OrderFunction& beta, int hi,
                                    Exec exec = Exec::Parallel);

// Dual operator on [0, iT]; the stencil at t = T is one-sided.
GridFunction dual_rl_profile(const GridFunction& y, const CombinedSpec& spec,
                             int iT, Exec exec = Exec::Parallel);

}  // namespace fracvar::fracops
