#include "fracvar/order.hpp"

#include <cmath>
#include <cstdio>

namespace fracvar {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

OrderFunction::OrderFunction(dsl::ExprPtr expr, double a, double b)
    : expr_(std::move(expr)),
      compiled_(expr_, {"t", "tau"}),
      a_(a),
      b_(b) {
  if (!(a_ < b_)) {
    throw OrderError("order function: requires a < b");
  }
  if (dsl::free_vars(*expr_).empty()) {
    double args[2] = {a_, a_};
    constant_ = compiled_(args);
  }
  validate();
}

OrderFunction::OrderFunction(const std::string& src, double a, double b)
    : OrderFunction(dsl::parse(src), a, b) {}

double OrderFunction::operator()(double first, double second) const {
  if (constant_) return *constant_;
  double args[2] = {first, second};
  return compiled_(args);
}

void OrderFunction::validate() const {
  constexpr int kLattice = 65;
  for (int i = 0; i < kLattice; ++i) {
    double t = a_ + (b_ - a_) * i / (kLattice - 1);
    for (int k = 0; k < kLattice; ++k) {
      double tau = a_ + (b_ - a_) * k / (kLattice - 1);
      double args[2] = {t, tau};
      double v = compiled_(args);
      if (!(v > 0.0 && v < 1.0)) {
        throw OrderError("order value " + fmt(v) + " at (t,tau)=(" + fmt(t) +
                         "," + fmt(tau) + ") lies outside (0,1)");
      }
    }
  }
}

OrderFunction constant_order(double value, double a, double b) {
  return OrderFunction(
      std::make_shared<dsl::Expr>(dsl::Expr{dsl::Expr::Num{value}}), a, b);
}

CombinedSpec::CombinedSpec(OrderFunction alpha_, OrderFunction beta_,
                           double gamma1_, double gamma2_)
    : alpha(std::move(alpha_)),
      beta(std::move(beta_)),
      gamma1(gamma1_),
      gamma2(gamma2_) {
  if (!(gamma1 >= 0.0 && gamma1 <= 1.0 && gamma2 >= 0.0 && gamma2 <= 1.0)) {
    throw OrderError("combined spec: gamma weights must lie in [0,1]");
  }
  if (alpha.a() != beta.a() || alpha.b() != beta.b()) {
    throw OrderError("combined spec: alpha and beta must share a domain");
  }
}

CombinedSpec constant_spec(double alpha, double beta, double gamma1,
                           double gamma2, double a, double b) {
  return CombinedSpec(constant_order(alpha, a, b), constant_order(beta, a, b),
                      gamma1, gamma2);
}

}  // namespace fracvar
