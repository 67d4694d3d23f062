#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fracvar/classic.hpp"
#include "fracvar/herglotz.hpp"

using namespace fracvar;
using namespace fracvar::classic;

namespace {

ClassicProblem make_problem(const std::string& L, const std::string& phi,
                            double a, double b, int n, double x_a,
                            double g1 = 0.5, double g2 = 0.5) {
  return ClassicProblem(Grid(a, b, n), constant_spec(0.5, 0.5, g1, g2, a, b),
                        Lagrangian3(L), TerminalCost(phi), x_a);
}

}  // namespace

TEST_CASE("eval_functional") {
  // L = 0, phi = 0
  {
    ClassicProblem p = make_problem("0", "0", 0.0, 3.0, 300, 1.0);
    GridFunction x = sample(p.grid, [](double) { return 1.0; });
    CHECK(eval_functional(p, x, 2.0) == 0.0);
  }
  // L = v^2 with x constant (v = 0) and phi = (T-2)^2 at T = 2
  {
    ClassicProblem p = make_problem("v^2", "(T - 2)^2", 0.0, 3.0, 300, 1.0);
    GridFunction x = sample(p.grid, [](double) { return 1.0; });
    CHECK(eval_functional(p, x, 2.0) == doctest::Approx(0.0).epsilon(1e-20));
  }
  // L = t^2 - 1, phi = 0, T = 1: integral is -2/3
  {
    ClassicProblem p = make_problem("t^2 - 1", "0", 0.0, 3.0, 3000, 0.0);
    GridFunction x = sample(p.grid, [](double) { return 0.0; });
    CHECK(eval_functional(p, x, 1.0) ==
          doctest::Approx(-2.0 / 3.0).epsilon(1e-8));
  }
}

TEST_CASE("functional monotonicity in the Lagrangian") {
  ClassicProblem p1 = make_problem("x^2", "0", 0.0, 1.0, 200, 0.5);
  ClassicProblem p2 = make_problem("x^2 + 1", "0", 0.0, 1.0, 200, 0.5);
  GridFunction x = sample(p1.grid, [](double t) { return 0.5 + t * t; });
  CHECK(eval_functional(p1, x, 1.0) <= eval_functional(p2, x, 1.0));
}

TEST_CASE("Euler-Lagrange residuals") {
  // L = v^2 with constant x: dL/dx = 0 and dL/dv = 2v = 0 exactly
  {
    ClassicProblem p = make_problem("v^2", "0", 0.0, 1.0, 2000, 1.0);
    GridFunction x = sample(p.grid, [](double) { return 1.0; });
    ElResiduals res = classic_el_residuals(p, x, p.grid.node(1000));
    CHECK(res.interior.max_abs() < 5e-3);
    CHECK(res.tail.max_abs() < 5e-3);
  }
  // gamma2 = 0 kills the tail identically
  {
    ClassicProblem p = make_problem("v^2 + x", "0", 0.0, 1.0, 500, 0.0, 1.0, 0.0);
    GridFunction x = sample(p.grid, [](double t) { return t * t; });
    ElResiduals res = classic_el_residuals(p, x, p.grid.node(250));
    CHECK(res.tail.max_abs() == 0.0);
  }
  // L = x: dL/dx = 1, dL/dv = 0, so the interior residual is exactly 1
  {
    ClassicProblem p = make_problem("x", "0", 0.0, 1.0, 400, 0.0);
    GridFunction x = sample(p.grid, [](double t) { return t; });
    ElResiduals res = classic_el_residuals(p, x, 1.0);
    for (int j : {0, 100, 400}) {
      CHECK(res.interior[j] == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("transversality, teo1 and teo2") {
  // phi = 0, L = v^2, x = 1: every line carries dL/dv = 0 or L(T) = 0
  {
    ClassicProblem p = make_problem("v^2", "0", 0.0, 1.0, 2000, 1.0);
    GridFunction x = sample(p.grid, [](double) { return 1.0; });
    ClassicTransversality tr = classic_transversality(p, x, 0.5);
    CHECK(std::fabs(tr.line1) < 5e-3);
    CHECK(std::fabs(tr.line2) < 5e-3);
    CHECK(std::fabs(tr.line3) < 5e-3);
  }
  // gamma2 = 0: third line is identically zero
  {
    ClassicProblem p = make_problem("v^2 + x*t", "T*xT", 0.0, 1.0, 500, 0.3, 1.0, 0.0);
    GridFunction x = sample(p.grid, [](double t) { return 0.3 + std::sin(t); });
    ClassicTransversality tr = classic_transversality(p, x, 0.5);
    CHECK(tr.line3 == 0.0);
  }
  // teo1 and teo2 first lines agree whenever line2 vanishes: here phi is
  // independent of xT and dL/dv = 0, so line2 = 0 exactly
  {
    ClassicProblem p = make_problem("x^2 + t", "T^2", 0.0, 1.0, 500, 0.2);
    GridFunction x = sample(p.grid, [](double t) { return 0.2 * std::exp(t); });
    ClassicTransversality t1 =
        classic_transversality(p, x, 0.5, TransversalityForm::Teo1);
    ClassicTransversality t2 =
        classic_transversality(p, x, 0.5, TransversalityForm::Teo2);
    CHECK(std::fabs(t1.line2) < 1e-12);
    CHECK(std::fabs(t1.line1 - t2.line1) < 1e-10);
    CHECK(t1.line3 == t2.line3);
  }
}

TEST_CASE("consistency with the Herglotz residuals for z-free Lagrangians") {
  const int n = 600;
  ClassicProblem pc = make_problem("v^2 + x^2*t", "0", 0.0, 1.0, n, 0.3);
  herglotz::HerglotzProblem ph(Grid(0.0, 1.0, n),
                               constant_spec(0.5, 0.5, 0.5, 0.5, 0.0, 1.0),
                               herglotz::Lagrangian("v^2 + x^2*t"), 0.3, 0.0);
  GridFunction x = sample(pc.grid, [](double t) { return 0.3 + t * t; });

  const double T = pc.grid.node(300);
  ElResiduals rc = classic_el_residuals(pc, x, T);

  GridFunction v = herglotz::caputo_profile(ph, x);
  GridFunction z = herglotz::solve_z(ph, x, v);
  GridFunction lam = herglotz::lambda_profile(ph, x, v, z);
  // dL/dz = 0 exactly, so lambda = 1 exactly
  for (int j : {0, 300, 600}) CHECK(lam[j] == 1.0);
  GridFunction ri = herglotz::el_residual_interior(ph, x, v, z, lam, T);
  GridFunction rt = herglotz::el_residual_tail(ph, x, v, z, lam, T);

  for (int j = 0; j <= pc.grid.n; ++j) {
    CHECK(std::fabs(rc.interior[j] - ri[j]) < 1e-10);
    CHECK(std::fabs(rc.tail[j] - rt[j]) < 1e-10);
  }
}
