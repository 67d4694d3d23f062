#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fracvar/fracops.hpp"
#include "fracvar/gamma.hpp"

using namespace fracvar;
using namespace fracvar::fracops;

namespace {

GridFunction reflect(const GridFunction& x) {
  const Grid& g = x.grid();
  std::vector<double> v(static_cast<std::size_t>(g.n) + 1);
  for (int j = 0; j <= g.n; ++j) v[static_cast<std::size_t>(j)] = x[g.n - j];
  return GridFunction(g, std::move(v));
}

GridFunction random_smooth(const Grid& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  double c0 = c(rng), c1 = c(rng), c2 = c(rng), c3 = c(rng);
  return sample(g, [&](double t) {
    return c0 + c1 * t + c2 * t * t + c3 * std::sin(3.0 * t);
  });
}

}  // namespace

TEST_CASE("left RL integral against constant-order closed forms") {
  Grid g(0.0, 1.0, 512);
  OrderFunction alpha = constant_order(0.5, 0.0, 1.0);

  GridFunction zero = zeros(g);
  for (int j : {0, 17, 256, 512}) {
    CHECK(left_rl_integral(zero, alpha, g.node(j)) == 0.0);
  }

  // x = 1: I^alpha 1 (t) = t^alpha / Gamma(1+alpha); at t=1 that is
  // 1/Gamma(1.5) = 1.1283791670955126
  GridFunction one = sample(g, [](double) { return 1.0; });
  CHECK(left_rl_integral(one, alpha, 1.0) ==
        doctest::Approx(1.1283791670955126).epsilon(1e-12));
  CHECK(left_rl_integral(one, alpha, 0.0) == 0.0);

  // x = tau: I^alpha tau (t) = t^(1+alpha)/Gamma(2+alpha); at t=1 that is
  // 1/Gamma(2.5) = 0.75225277806367505
  GridFunction lin = sample(g, [](double t) { return t; });
  CHECK(left_rl_integral(lin, alpha, 1.0) ==
        doctest::Approx(0.75225277806367505).epsilon(1e-12));
}

TEST_CASE("right RL integral mirrors the left one") {
  Grid g(0.0, 1.0, 512);
  OrderFunction alpha = constant_order(0.5, 0.0, 1.0);
  GridFunction one = sample(g, [](double) { return 1.0; });
  CHECK(right_rl_integral(one, alpha, 0.0) ==
        doctest::Approx(1.1283791670955126).epsilon(1e-12));
  CHECK(right_rl_integral(one, alpha, 1.0) == 0.0);

  // change of variables: right of x at t equals left of the reflection at
  // a + b - t
  std::mt19937 rng(11);
  GridFunction x = random_smooth(g, rng);
  GridFunction xr = reflect(x);
  for (int j : {0, 100, 333, 512}) {
    double right = right_rl_integral(x, alpha, g.node(j));
    double left = left_rl_integral(xr, alpha, g.node(g.n - j));
    CHECK(right == doctest::Approx(left).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("Caputo derivatives against closed forms") {
  // constants die
  Grid g3(0.0, 3.0, 400);
  OrderFunction a05 = constant_order(0.5, 0.0, 3.0);
  GridFunction c = sample(g3, [](double) { return 2.75; });
  for (int j : {0, 13, 200, 400}) {
    CHECK(std::fabs(left_caputo(c, a05, g3.node(j))) < 1e-12);
    CHECK(std::fabs(right_caputo(c, a05, g3.node(j))) < 1e-12);
  }

  // x = tau with a first-argument-only variable order:
  // left Caputo = t^(1-alpha(t)) / Gamma(2-alpha(t)) exactly
  OrderFunction avar("0.5 + 0.1*t/3", 0.0, 3.0);
  GridFunction lin = sample(g3, [](double t) { return t; });
  for (int j : {40, 133, 266, 400}) {
    double t = g3.node(j);
    double a = 0.5 + 0.1 * t / 3.0;
    double want = std::pow(t, 1.0 - a) / gamma_fn(2.0 - a);
    CHECK(left_caputo(lin, avar, t) == doctest::Approx(want).epsilon(1e-12));
  }

  // mirrored: right Caputo with a second-argument-only order
  OrderFunction bvar("0.5 + 0.05*tau", 0.0, 3.0);
  for (int j : {0, 133, 266, 360}) {
    double t = g3.node(j);
    double b = 0.5 + 0.05 * t;
    double want = -std::pow(3.0 - t, 1.0 - b) / gamma_fn(2.0 - b);
    CHECK(right_caputo(lin, bvar, t) == doctest::Approx(want).epsilon(1e-12));
  }

  // x = tau^2, constant alpha = 0.4, t = 1:
  // Gamma(3)/Gamma(3 - 0.4) t^(2-0.4) = 2/Gamma(2.6) = 1.3989686925876527
  Grid g1(0.0, 1.0, 500);
  OrderFunction a04 = constant_order(0.4, 0.0, 1.0);
  GridFunction sq = sample(g1, [](double t) { return t * t; });
  CHECK(left_caputo(sq, a04, 1.0) ==
        doctest::Approx(1.3989686925876527).epsilon(1e-12));
}

TEST_CASE("RL derivatives against closed forms") {
  Grid g(0.0, 1.0, 100);
  OrderFunction alpha = constant_order(0.5, 0.0, 1.0);

  // x = 1: D^alpha 1 (t) = t^(-alpha)/Gamma(1-alpha);
  // at t = 0.64 that is 0.64^(-0.5)/Gamma(0.5) = 0.70523697943469536
  GridFunction one = sample(g, [](double) { return 1.0; });
  CHECK(left_rl_deriv(one, alpha, 0.64) ==
        doctest::Approx(0.70523697943469536).epsilon(2e-4));

  // x = tau: D^alpha tau (t) = t^(1-alpha)/Gamma(2-alpha)
  GridFunction lin = sample(g, [](double t) { return t; });
  for (int j : {20, 50, 80}) {
    double t = g.node(j);
    double want = std::pow(t, 0.5) / gamma_fn(1.5);
    CHECK(left_rl_deriv(lin, alpha, t) == doctest::Approx(want).epsilon(1e-4));
  }

  // right derivative of a constant: c (b-t)^(-beta) / Gamma(1-beta)
  for (int j : {20, 50, 80}) {
    double t = g.node(j);
    double want = std::pow(1.0 - t, -0.5) / gamma_fn(0.5);
    CHECK(right_rl_deriv(one, alpha, t) == doctest::Approx(want).epsilon(2e-3));
  }
}

TEST_CASE("RL derivative reflection symmetry") {
  Grid g(0.0, 1.0, 400);
  OrderFunction alpha = constant_order(0.5, 0.0, 1.0);
  std::mt19937 rng(5);
  GridFunction x = random_smooth(g, rng);
  GridFunction xr = reflect(x);
  for (int j : {40, 200, 360}) {
    double right = right_rl_deriv(x, alpha, g.node(j));
    double left = left_rl_deriv(xr, alpha, g.node(g.n - j));
    CHECK(right == doctest::Approx(left).epsilon(1e-8).scale(1.0));
  }
  // and the Caputo pair
  for (int j : {40, 200, 360}) {
    double right = right_caputo(x, alpha, g.node(j));
    double left = left_caputo(xr, alpha, g.node(g.n - j));
    CHECK(right == doctest::Approx(left).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("operator linearity") {
  Grid g(0.0, 1.0, 500);
  OrderFunction alpha = constant_order(0.5, 0.0, 1.0);
  OrderFunction avar("0.4 + 0.2*t*tau", 0.0, 1.0);
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int rep = 0; rep < 3; ++rep) {
    GridFunction x = random_smooth(g, rng);
    GridFunction y = random_smooth(g, rng);
    double a = coef(rng), b = coef(rng);
    std::vector<double> mixv(static_cast<std::size_t>(g.n) + 1);
    for (int j = 0; j <= g.n; ++j) mixv[static_cast<std::size_t>(j)] = a * x[j] + b * y[j];
    GridFunction mix(g, std::move(mixv));

    for (const OrderFunction* o : {&alpha, &avar}) {
      for (int j : {0, 125, 250, 500}) {
        double t = g.node(j);
        CHECK(std::fabs(left_rl_integral(mix, *o, t) -
                        (a * left_rl_integral(x, *o, t) +
                         b * left_rl_integral(y, *o, t))) < 1e-10);
        CHECK(std::fabs(left_caputo(mix, *o, t) -
                        (a * left_caputo(x, *o, t) + b * left_caputo(y, *o, t))) <
              1e-10);
        CHECK(std::fabs(left_rl_deriv(mix, *o, t) -
                        (a * left_rl_deriv(x, *o, t) +
                         b * left_rl_deriv(y, *o, t))) < 1e-10);
        CHECK(std::fabs(right_caputo(mix, *o, t) -
                        (a * right_caputo(x, *o, t) + b * right_caputo(y, *o, t))) <
              1e-10);
      }
    }
  }
}

TEST_CASE("combined Caputo and the gamma decomposition") {
  Grid g(0.0, 3.0, 300);
  std::mt19937 rng(3);
  GridFunction x = random_smooth(g, rng);

  CombinedSpec both = constant_spec(0.5, 0.6, 0.3, 0.8, 0.0, 3.0);
  CombinedSpec left_only = constant_spec(0.5, 0.6, 1.0, 0.0, 0.0, 3.0);
  CombinedSpec right_only = constant_spec(0.5, 0.6, 0.0, 1.0, 0.0, 3.0);

  for (int j : {0, 50, 150, 300}) {
    double t = g.node(j);
    CHECK(combined_caputo(x, left_only, t) == left_caputo(x, left_only.alpha, t));
    CHECK(combined_caputo(x, right_only, t) == right_caputo(x, right_only.beta, t));
    // exact decomposition, same floating-point operations on both sides
    CHECK(combined_caputo(x, both, t) ==
          0.3 * combined_caputo(x, left_only, t) +
              0.8 * combined_caputo(x, right_only, t));
  }
}

TEST_CASE("combined Caputo of x=t reproduces the worked forcing term") {
  // alpha(t) = 0.5 + 0.1 t/3 (first argument only), beta = 0.5,
  // gamma = (1/2, 1/2):  f(t) = t^(1-a)/(2 G(2-a)) - (3-t)^(1/2)/(2 G(1.5))
  Grid g(0.0, 3.0, 2000);
  CombinedSpec spec(OrderFunction("0.5 + 0.1*t/3", 0.0, 3.0),
                    constant_order(0.5, 0.0, 3.0), 0.5, 0.5);
  GridFunction x = sample(g, [](double t) { return t; });
  GridFunction v = caputo_profile(x, spec);
  double worst = 0.0;
  for (int j = 0; j <= g.n; ++j) {
    double t = g.node(j);
    double a = 0.5 + 0.1 * t / 3.0;
    double f = std::pow(t, 1.0 - a) / (2.0 * gamma_fn(2.0 - a)) -
               std::pow(3.0 - t, 0.5) / (2.0 * gamma_fn(1.5));
    worst = std::max(worst, std::fabs(v[j] - f));
  }
  CHECK(worst < 5e-3);
  CHECK(worst < 1e-10);  // the scheme is exact on linear data
}

TEST_CASE("dual operator") {
  Grid g(0.0, 1.0, 200);
  std::mt19937 rng(8);
  GridFunction y = random_smooth(g, rng);

  CombinedSpec degenerate = constant_spec(0.5, 0.5, 0.0, 0.0, 0.0, 1.0);
  CHECK(dual_rl(y, degenerate, 1.0, 0.5) == 0.0);

  // gamma = (0,1): the dual is the left RL derivative of order beta
  CombinedSpec left_part = constant_spec(0.4, 0.6, 0.0, 1.0, 0.0, 1.0);
  for (int j : {10, 100, 150}) {
    CHECK(dual_rl(y, left_part, 1.0, g.node(j)) ==
          doctest::Approx(left_rl_deriv(y, left_part.beta, g.node(j)))
              .epsilon(1e-12));
  }

  GridFunction zero = zeros(g);
  CombinedSpec both = constant_spec(0.4, 0.6, 0.5, 0.5, 0.0, 1.0);
  CHECK(dual_rl(zero, both, 1.0, 0.25) == 0.0);
  CHECK_THROWS_AS(dual_rl(y, both, 0.5, 0.75), GridError);
}

TEST_CASE("integration by parts residual") {
  OrderFunction alpha = constant_order(0.5, 0.0, 1.0);

  // x = 0 kills both sides exactly
  {
    Grid g(0.0, 1.0, 200);
    GridFunction x = zeros(g);
    GridFunction y = sample(g, [](double t) { return 1.0 + t; });
    CHECK(ibp_residual(x, y, alpha, IbpSide::LeftCaputo) == 0.0);
    CHECK(ibp_residual(x, y, alpha, IbpSide::RightCaputo) == 0.0);
  }

  // x = t, y = 1: left side integrates to 2/(3 Gamma(1.5))
  {
    std::vector<double> res;
    for (int n : {500, 1000, 2000}) {
      Grid g(0.0, 1.0, n);
      GridFunction x = sample(g, [](double t) { return t; });
      GridFunction y = sample(g, [](double) { return 1.0; });
      res.push_back(ibp_residual(x, y, alpha, IbpSide::LeftCaputo));
    }
    CHECK(res[2] < 5e-3);
    CHECK(res[1] < res[0]);
    CHECK(res[2] < res[1]);
  }

  // smooth pair: residual roughly halves per doubling
  {
    std::vector<double> res;
    for (int n : {500, 1000, 2000}) {
      Grid g(0.0, 1.0, n);
      GridFunction x = sample(g, [](double t) { return t * t; });
      GridFunction y = sample(g, [](double t) { return (1.0 - t) * (1.0 - t); });
      res.push_back(ibp_residual(x, y, alpha, IbpSide::LeftCaputo));
    }
    CHECK(res[2] < 5e-3);
    double ratio = res[0] / res[1];
    CHECK(ratio > 1.5);
    CHECK(ratio < 3.0);
    CHECK(std::log2(res[0] / res[1]) >= 0.9);
    CHECK(std::log2(res[1] / res[2]) >= 0.9);
  }

  // grid mismatch is an error
  {
    Grid g1(0.0, 1.0, 100), g2(0.0, 1.0, 120);
    GridFunction x = sample(g1, [](double t) { return t; });
    GridFunction y = sample(g2, [](double) { return 1.0; });
    CHECK_THROWS_AS(ibp_residual(x, y, alpha), GridError);
  }
}

TEST_CASE("constant-order monomial oracle under refinement") {
  // left Caputo of t^k for constant alpha matches
  // Gamma(k+1)/Gamma(k+1-alpha) t^(k-alpha)
  OrderFunction alpha = constant_order(0.4, 0.0, 1.0);
  for (int k : {1, 2}) {
    std::vector<double> errs;
    for (int n : {2000, 4000, 8000}) {
      Grid g(0.0, 1.0, n);
      GridFunction x = sample(g, [&](double t) { return std::pow(t, k); });
      GridFunction v = left_caputo_profile(x, alpha, Exec::Serial);
      double worst = 0.0;
      for (int j = 1; j <= g.n; ++j) {
        double t = g.node(j);
        double want = gamma_fn(k + 1.0) / gamma_fn(k + 1.0 - 0.4) *
                      std::pow(t, k - 0.4);
        worst = std::max(worst, std::fabs(v[j] - want) / std::fabs(want));
      }
      errs.push_back(worst);
    }
    CHECK(errs[0] < 1e-2);
    CHECK(errs[1] <= 1.1 * errs[0]);
    CHECK(errs[2] <= 1.1 * errs[1]);
  }
}

TEST_CASE("order validation") {
  CHECK_THROWS_AS(OrderFunction("1.2", 0.0, 1.0), OrderError);
  CHECK_THROWS_AS(OrderFunction("t/3 + 0.5", 0.0, 3.0), OrderError);
  CHECK_THROWS_AS(OrderFunction("0", 0.0, 1.0), OrderError);
  CHECK_NOTHROW(OrderFunction("0.5 + 0.4*sin(t*tau)", 0.0, 1.0));
  CHECK_THROWS_AS(constant_spec(0.5, 0.5, -0.1, 0.5, 0.0, 1.0), OrderError);
  CHECK_THROWS_AS(constant_spec(0.5, 0.5, 0.5, 1.5, 0.0, 1.0), OrderError);
  CHECK(constant_spec(0.5, 0.5, 0.0, 0.0, 0.0, 1.0).degenerate());
}

TEST_CASE("off-node queries are rejected") {
  Grid g(0.0, 1.0, 100);
  OrderFunction alpha = constant_order(0.5, 0.0, 1.0);
  GridFunction x = sample(g, [](double t) { return t; });
  CHECK_THROWS_AS(left_rl_integral(x, alpha, 0.505), GridError);
  CHECK_THROWS_AS(left_caputo(x, alpha, 1.5), GridError);
}
