#pragma once

// Herglotz problems with n spatial axes: the z-equation integrates the
// Lagrangian over the spatial box Omega at every time, each axis carries
// its own combined Caputo operator, and the residual fields generalize the
// one-dimensional Euler-Lagrange conditions. The API is generic in n;
// the tests exercise n = 1.

#include <optional>
#include <string>
#include <vector>

#include "fracvar/expr.hpp"
#include "fracvar/fracops.hpp"
#include "fracvar/grid.hpp"
#include "fracvar/herglotz.hpp"
#include "fracvar/order.hpp"

namespace fracvar::multidim {

using fracops::Exec;

// Samples of x(t, s) on the tensor grid. Time-major storage: the spatial
// layer of time node `it` is the contiguous block [it * spatial_size(),
// (it+1) * spatial_size()), row-major over the spatial axes.
class Field {
 public:
  Field(Grid time_grid, std::vector<Grid> space_grids);

  const Grid& time_grid() const { return time_grid_; }
  const std::vector<Grid>& space_grids() const { return space_grids_; }
  int axes() const { return static_cast<int>(space_grids_.size()); }
  int spatial_size() const { return spatial_size_; }

  double at(int it, int fs) const {
    return values_[static_cast<std::size_t>(it) * spatial_size_ + fs];
  }
  double& at(int it, int fs) {
    return values_[static_cast<std::size_t>(it) * spatial_size_ + fs];
  }
  const std::vector<double>& values() const { return values_; }

  // Spatial multi-index of a flat index, and back.
  std::vector<int> unflatten(int fs) const;
  int stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  double max_abs() const;

 private:
  Grid time_grid_;
  std::vector<Grid> space_grids_;
  std::vector<int> strides_;
  int spatial_size_;
  std::vector<double> values_;
};

// L(t, s1..sn, x, v, w1..wn, z) with finite-difference partials; slot
// layout follows that variable order.
class MultiLagrangian {
 public:
  MultiLagrangian() = default;
  MultiLagrangian(dsl::ExprPtr expr, int axes, double fd_step = 1e-6);

  int axes() const { return axes_; }
  double value(std::span<const double> args) const { return compiled_(args); }
  double partial(int slot, std::span<double> args) const;

  // Slot positions inside the argument vector.
  int slot_x() const { return axes_ + 1; }
  int slot_v() const { return axes_ + 2; }
  int slot_w(int axis) const { return axes_ + 3 + axis; }
  int slot_z() const { return 2 * axes_ + 3; }
  int arg_count() const { return 2 * axes_ + 4; }

  const dsl::ExprPtr& expr() const { return expr_; }

 private:
  dsl::ExprPtr expr_;
  dsl::CompiledExpr compiled_;
  int axes_ = 0;
  double fd_step_ = 1e-6;
};

struct MultiProblem {
  MultiProblem(Grid time_grid, std::vector<Grid> space_grids,
               CombinedSpec time_spec, std::vector<CombinedSpec> space_specs,
               MultiLagrangian lagrangian, dsl::ExprPtr boundary, double z_a,
               double fd_step = 1e-6);

  Grid time_grid;
  std::vector<Grid> space_grids;
  CombinedSpec time_spec;
  std::vector<CombinedSpec> space_specs;
  MultiLagrangian lagrangian;
  dsl::ExprPtr boundary;  // g(t, s1..sn) on the boundary of P
  double z_a;
  double fd_step;
};

// Samples an expression of (t, s1..sn) on the tensor grid.
Field sample_field(const Grid& time_grid, const std::vector<Grid>& space_grids,
                   const dsl::ExprPtr& e);

// Tensor-trapezoid weights over the flat spatial index; sums to |Omega|.
std::vector<double> spatial_weights(const std::vector<Grid>& space_grids);

struct Axis {
  static constexpr int kTime = -1;
  int value = kTime;  // kTime or a spatial axis index
};

// Combined Caputo derivative applied along every 1-D line of the field in
// the given axis, other coordinates held fixed.
Field axis_caputo_profile(const Field& f, Axis axis, const CombinedSpec& spec,
                          Exec exec = Exec::Parallel);

// Throws GridError if the field violates x = g on the boundary of P by
// more than 1e-10.
void check_boundary(const MultiProblem& p, const Field& x);

// RK4 in time for z' = int_Omega L dns, z(a) = z_a, with the x, v, w
// layers linearly interpolated at the half steps.
GridFunction solve_z_multi(const MultiProblem& p, const Field& x);

// lambda(t) = exp(-int_a^t int_Omega dL/dz dns dtau).
GridFunction lambda_profile_multi(const MultiProblem& p, const Field& x,
                                  const GridFunction& z);

// Interior residual on [a,T] x Omega,
//   dL/dx lambda + dual_time(lambda dL/dv) + sum_i dual_si(lambda dL/dwi),
// and the gamma2-scaled tail on [T,b] x Omega. Fields are stored on the
// full grids with zeros outside their time range.
struct MultiResiduals {
  Field interior;
  Field tail;
};
MultiResiduals el_residual_multi(const MultiProblem& p, const Field& x,
                                 const GridFunction& z,
                                 const GridFunction& lambda, double T,
                                 Exec exec = Exec::Parallel);

// The time-direction RL-integral bracket at t = T for every s (evaluated
// at the node itself, zero-width integrals), its spatial integral, and
// int_Omega L(T, s, ...) dns.
struct MultiTransversality {
  std::vector<double> bracket;  // flat over Omega
  double bracket_integral = 0.0;
  double lagrangian_integral_at_T = 0.0;
};
MultiTransversality transversality_multi(const MultiProblem& p, const Field& x,
                                         const GridFunction& z,
                                         const GridFunction& lambda, double T);

// Root scan of G(T) = int_Omega L(T,...) dns as in the 1-D case.
herglotz::TerminalTime find_terminal_time_multi(const MultiProblem& p,
                                                const Field& x,
                                                double root_tol = 1e-8);

struct MultiVerificationReport {
  double T = 0.0;
  double z_at_T = 0.0;
  double el_interior_norm = 0.0;
  double el_tail_norm = 0.0;
  double trans_field_norm = 0.0;
  double trans_integral = 0.0;
  double lagrangian_at_T = 0.0;
  std::vector<std::string> flags;
};

MultiVerificationReport verify_multi(const MultiProblem& p, const Field& x,
                                     std::optional<double> T = std::nullopt,
                                     double root_tol = 1e-8);

}  // namespace fracvar::multidim
