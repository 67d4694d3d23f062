#include "fracvar/grid.hpp"

#include <cmath>
#include <string>

namespace fracvar {

Grid::Grid(double a_, double b_, int n_) : a(a_), b(b_), n(n_) {
  if (!(a < b)) {
    throw GridError("grid: requires a < b, got [" + std::to_string(a) + ", " +
                    std::to_string(b) + "]");
  }
  if (n < 2) {
    throw GridError("grid: requires n >= 2, got " + std::to_string(n));
  }
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw GridError("grid: non-finite endpoints");
  }
}

std::vector<double> Grid::nodes() const {
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) out[static_cast<std::size_t>(j)] = node(j);
  return out;
}

int Grid::index_of(double t) const {
  double pos = (t - a) / (b - a) * n;
  int j = static_cast<int>(std::lround(pos));
  if (j < 0 || j > n || std::fabs(node(j) - t) > 1e-9 * h() + 1e-12 * std::fabs(t)) {
    throw GridError("t = " + std::to_string(t) + " is not a grid node");
  }
  return j;
}

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.n + 1) {
    throw GridError("grid function: expected " + std::to_string(grid_.n + 1) +
                    " values, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw GridError("grid function: non-finite value");
    }
  }
}

double GridFunction::value_at(double t) const {
  const Grid& g = grid_;
  if (t <= g.a) return values_.front();
  if (t >= g.b) return values_.back();
  double pos = (t - g.a) / (g.b - g.a) * g.n;
  int j = static_cast<int>(pos);
  if (j >= g.n) j = g.n - 1;
  double theta = (t - g.node(j)) / g.h();
  return values_[static_cast<std::size_t>(j)] +
         theta * (values_[static_cast<std::size_t>(j) + 1] -
                  values_[static_cast<std::size_t>(j)]);
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

GridFunction zeros(const Grid& grid) {
  return GridFunction(grid, std::vector<double>(static_cast<std::size_t>(grid.n) + 1, 0.0));
}

GridFunction sample(const Grid& grid, const std::function<double(double)>& f) {
  std::vector<double> v(static_cast<std::size_t>(grid.n) + 1);
  for (int j = 0; j <= grid.n; ++j) v[static_cast<std::size_t>(j)] = f(grid.node(j));
  return GridFunction(grid, std::move(v));
}

GridFunction sample(const Grid& grid, const dsl::ExprPtr& e,
                    const std::string& var) {
  dsl::CompiledExpr compiled(e, {var});
  std::vector<double> v(static_cast<std::size_t>(grid.n) + 1);
  for (int j = 0; j <= grid.n; ++j) {
    double t = grid.node(j);
    v[static_cast<std::size_t>(j)] = compiled(std::span<const double>(&t, 1));
  }
  return GridFunction(grid, std::move(v));
}

double trapezoid(const GridFunction& f) { return trapezoid(f, 0, f.grid().n); }

double trapezoid(const GridFunction& f, int lo, int hi) {
  if (lo < 0 || hi > f.grid().n || lo > hi) {
    throw GridError("trapezoid: bad node range");
  }
  if (lo == hi) return 0.0;
  double acc = 0.5 * (f[lo] + f[hi]);
  for (int j = lo + 1; j < hi; ++j) acc += f[j];
  return acc * f.grid().h();
}

GridFunction derivative(const GridFunction& x) {
  const Grid& g = x.grid();
  const double h = g.h();
  std::vector<double> d(static_cast<std::size_t>(g.n) + 1);
  const int n = g.n;
  d[0] = (4.0 * (x[1] - x[0]) - (x[2] - x[0])) / (2.0 * h);
  for (int j = 1; j < n; ++j) {
    d[static_cast<std::size_t>(j)] = (x[j + 1] - x[j - 1]) / (2.0 * h);
  }
  d[static_cast<std::size_t>(n)] =
      (4.0 * (x[n] - x[n - 1]) - (x[n] - x[n - 2])) / (2.0 * h);
  return GridFunction(g, std::move(d));
}

}  // namespace fracvar
