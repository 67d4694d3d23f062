#pragma once

#include <optional>
#include <string>

#include "fracvar/expr.hpp"
#include "fracvar/grid.hpp"

namespace fracvar {

// A bivariate order function (t,tau) -> (0,1) on the square [a,b]^2.
// Construction samples a 65x65 uniform lattice of the square and rejects
// any value outside the open interval (0,1); there is no clamping.
class OrderFunction {
 public:
  OrderFunction(dsl::ExprPtr expr, double a, double b);
  OrderFunction(const std::string& src, double a, double b);

  double operator()(double first, double second) const;

  // Set when the expression has no free variables.
  std::optional<double> constant_value() const { return constant_; }

  double a() const { return a_; }
  double b() const { return b_; }
  const dsl::ExprPtr& expr() const { return expr_; }

 private:
  void validate() const;

  dsl::ExprPtr expr_;
  dsl::CompiledExpr compiled_;
  double a_, b_;
  std::optional<double> constant_;
};

OrderFunction constant_order(double value, double a, double b);

// The combined operator weights and both order functions. gamma1 scales the
// left-sided part, gamma2 the right-sided part; the dual operator swaps
// them. gamma = (0,0) is accepted but flagged degenerate.
struct CombinedSpec {
  CombinedSpec(OrderFunction alpha, OrderFunction beta, double gamma1,
               double gamma2);

  OrderFunction alpha;
  OrderFunction beta;
  double gamma1;
  double gamma2;

  bool degenerate() const { return gamma1 == 0.0 && gamma2 == 0.0; }
};

// Convenience for tests: constant orders on [a,b].
CombinedSpec constant_spec(double alpha, double beta, double gamma1,
                           double gamma2, double a, double b);

}  // namespace fracvar
