#pragma once

#include <functional>
#include <vector>

#include "fracvar/error.hpp"
#include "fracvar/expr.hpp"

namespace fracvar {

// Uniform grid on [a,b] with n subintervals and nodes t_j = a + j (b-a)/n.
struct Grid {
  Grid(double a, double b, int n);

  double a;
  double b;
  int n;

  double h() const { return (b - a) / n; }
  int size() const { return n + 1; }
  double node(int j) const { return a + (b - a) * j / n; }
  std::vector<double> nodes() const;

  // Node index of t; throws GridError if t is not (close to) a node.
  int index_of(double t) const;

  bool operator==(const Grid& o) const {
    return a == o.a && b == o.b && n == o.n;
  }
};

// Samples of a scalar function at the grid nodes.
class GridFunction {
 public:
  GridFunction(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int j) const { return values_[static_cast<std::size_t>(j)]; }
  double& operator[](int j) { return values_[static_cast<std::size_t>(j)]; }
  const std::vector<double>& values() const { return values_; }

  // Piecewise-linear interpolation; t clamped to [a,b].
  double value_at(double t) const;

  double max_abs() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

GridFunction zeros(const Grid& grid);
GridFunction sample(const Grid& grid, const std::function<double(double)>& f);
// Samples an expression of the single variable `var` (throws EvalError if
// the expression references anything else).
GridFunction sample(const Grid& grid, const dsl::ExprPtr& e,
                    const std::string& var = "t");

// Trapezoid rule over node range [lo, hi] (defaults to the whole grid).
double trapezoid(const GridFunction& f);
double trapezoid(const GridFunction& f, int lo, int hi);

// Nodewise derivative: 2nd-order central differences in the interior,
// 2nd-order one-sided stencils at the ends. Uses difference forms so the
// derivative of a constant is exactly zero.
GridFunction derivative(const GridFunction& x);

}  // namespace fracvar
