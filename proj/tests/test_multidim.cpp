#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fracvar/gamma.hpp"
#include "fracvar/multidim.hpp"

using namespace fracvar;
using namespace fracvar::multidim;

namespace {

// n = 1 problem on [0,b] x [0,1] with zero boundary data.
MultiProblem make_problem(const std::string& L, int nt, int ns, double b = 3.0,
                          double z_a = 0.0) {
  return MultiProblem(Grid(0.0, b, nt), {Grid(0.0, 1.0, ns)},
                      constant_spec(0.5, 0.5, 0.5, 0.5, 0.0, b),
                      {constant_spec(0.5, 0.5, 0.5, 0.5, 0.0, 1.0)},
                      MultiLagrangian(dsl::parse(L), 1), dsl::parse("0"), z_a);
}

Field zero_field(const MultiProblem& p) {
  return Field(p.time_grid, p.space_grids);
}

}  // namespace

TEST_CASE("axis profiles") {
  Grid tg(0.0, 3.0, 200);
  std::vector<Grid> sg = {Grid(0.0, 1.0, 40)};
  CombinedSpec left_only = constant_spec(0.5, 0.5, 1.0, 0.0, 0.0, 3.0);

  // constant in the chosen axis: profile vanishes
  Field c = sample_field(tg, sg, dsl::parse("s1 + 1"));
  Field pc = axis_caputo_profile(c, Axis{Axis::kTime}, left_only);
  CHECK(pc.max_abs() < 1e-12);

  // x(t,s) = t with the time axis: t^(1-a)/Gamma(2-a) replicated over s
  Field lin = sample_field(tg, sg, dsl::parse("t"));
  Field pl = axis_caputo_profile(lin, Axis{Axis::kTime}, left_only);
  for (int it : {20, 100, 200}) {
    double want = std::pow(tg.node(it), 0.5) / gamma_fn(1.5);
    for (int fs : {0, 17, 40}) {
      CHECK(pl.at(it, fs) == doctest::Approx(want).epsilon(1e-12));
    }
  }

  // separable x(t,s) = u(t) rho(s): time profile equals rho(s) times the
  // 1-D profile of u
  Field sep = sample_field(tg, sg, dsl::parse("(t^2)*(1 + s1)"));
  Field ps = axis_caputo_profile(sep, Axis{Axis::kTime}, left_only);
  GridFunction u = sample(tg, [](double t) { return t * t; });
  GridFunction pu = fracops::caputo_profile(u, left_only);
  for (int it : {30, 120}) {
    for (int fs : {0, 20, 40}) {
      double rho = 1.0 + sg[0].node(fs);
      CHECK(ps.at(it, fs) == doctest::Approx(rho * pu[it]).epsilon(1e-10));
    }
  }

  // spatial axis
  CombinedSpec sspec = constant_spec(0.5, 0.5, 1.0, 0.0, 0.0, 1.0);
  Field slin = sample_field(tg, sg, dsl::parse("s1"));
  Field pslin = axis_caputo_profile(slin, Axis{0}, sspec);
  for (int fs : {5, 20, 40}) {
    double want = std::pow(sg[0].node(fs), 0.5) / gamma_fn(1.5);
    CHECK(pslin.at(77, fs) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("solve_z_multi") {
  // L = 0: z stays at z_a
  {
    MultiProblem p = make_problem("0", 100, 20, 3.0, 0.7);
    GridFunction z = solve_z_multi(p, zero_field(p));
    for (int it : {0, 50, 100}) CHECK(z[it] == 0.7);
  }
  // x-independent L = t^2 - 1 over a unit box: z = z_a + t^3/3 - t
  {
    MultiProblem p = make_problem("t^2 - 1", 400, 20, 3.0, 0.25);
    GridFunction z = solve_z_multi(p, zero_field(p));
    double worst = 0.0;
    for (int it = 0; it <= 400; ++it) {
      double t = p.time_grid.node(it);
      worst = std::max(worst, std::fabs(z[it] - (0.25 + t * t * t / 3.0 - t)));
    }
    CHECK(worst < 1e-9);
  }
  // L = w1^2 with x constant in s: the spatial Caputo vanishes
  {
    MultiProblem p = make_problem("w1^2", 100, 20);
    GridFunction z = solve_z_multi(p, zero_field(p));
    for (int it : {0, 100}) CHECK(z[it] == 0.0);
  }
}

TEST_CASE("boundary violations are rejected") {
  MultiProblem p = make_problem("t^2 - 1", 50, 10);
  Field bad = sample_field(p.time_grid, p.space_grids, dsl::parse("s1*(1 - s1)"));
  // interior profile is fine, but the t = 0 face carries nonzero values
  CHECK_THROWS_AS(solve_z_multi(p, bad), GridError);

  Field good = zero_field(p);
  CHECK_NOTHROW(solve_z_multi(p, good));
}

TEST_CASE("manufactured zero solution") {
  // g = 0, x = 0, L = v^2 + w1^2 + t^2 - 1: all partials vanish at x = 0
  MultiProblem p = make_problem("v^2 + w1^2 + t^2 - 1", 200, 100);
  Field x = zero_field(p);
  GridFunction z = solve_z_multi(p, x);
  GridFunction lam = lambda_profile_multi(p, x, z);
  const double T = 1.0 + 0.5e-2;  // nearest node to 1 for nt=200 on [0,3]
  const int iT = p.time_grid.index_of(p.time_grid.node(67));
  MultiResiduals res = el_residual_multi(p, x, z, lam, p.time_grid.node(iT));
  double interior_norm = 0.0, tail_norm = 0.0;
  for (int it = 0; it <= iT; ++it) {
    for (int fs = 0; fs < x.spatial_size(); ++fs) {
      interior_norm = std::max(interior_norm, std::fabs(res.interior.at(it, fs)));
    }
  }
  for (int it = iT; it <= p.time_grid.n; ++it) {
    for (int fs = 0; fs < x.spatial_size(); ++fs) {
      tail_norm = std::max(tail_norm, std::fabs(res.tail.at(it, fs)));
    }
  }
  CHECK(interior_norm < 5e-3);
  CHECK(tail_norm < 5e-3);
  (void)T;

  MultiTransversality tr = transversality_multi(p, x, z, lam, p.time_grid.node(iT));
  double bracket_norm = 0.0;
  for (double v : tr.bracket) bracket_norm = std::max(bracket_norm, std::fabs(v));
  CHECK(bracket_norm < 5e-3);
  // scalar condition: int_Omega (T^2 - 1) ds = T^2 - 1
  double Tn = p.time_grid.node(iT);
  CHECK(tr.lagrangian_integral_at_T ==
        doctest::Approx(Tn * Tn - 1.0).epsilon(1e-10));

  herglotz::TerminalTime tt = find_terminal_time_multi(p, x);
  CHECK(std::fabs(tt.T - 1.0) < 1e-6);
}

TEST_CASE("gamma2 = 0 kills the multidim tail") {
  MultiProblem p(Grid(0.0, 3.0, 100), {Grid(0.0, 1.0, 10)},
                 constant_spec(0.5, 0.5, 1.0, 0.0, 0.0, 3.0),
                 {constant_spec(0.5, 0.5, 1.0, 0.0, 0.0, 1.0)},
                 MultiLagrangian(dsl::parse("v^2 + z + t^2 - 1"), 1),
                 dsl::parse("0"), 0.0);
  Field x = Field(p.time_grid, p.space_grids);
  GridFunction z = solve_z_multi(p, x);
  GridFunction lam = lambda_profile_multi(p, x, z);
  MultiResiduals res = el_residual_multi(p, x, z, lam, p.time_grid.node(50));
  CHECK(res.tail.max_abs() == 0.0);
}

TEST_CASE("dimensional consistency with the 1-D solver") {
  // n = 1, L independent of s and w1, field constant in s, |Omega| = 1
  const int nt = 300;
  const std::string L = "v^2 + z + t^2 - 1";
  MultiProblem pm(Grid(0.0, 3.0, nt), {Grid(0.0, 1.0, 30)},
                  constant_spec(0.5, 0.5, 0.5, 0.5, 0.0, 3.0),
                  {constant_spec(0.5, 0.5, 0.5, 0.5, 0.0, 1.0)},
                  MultiLagrangian(dsl::parse(L), 1), dsl::parse("1"), 0.0);
  Field xf = sample_field(pm.time_grid, pm.space_grids, dsl::parse("1"));

  herglotz::HerglotzProblem p1(Grid(0.0, 3.0, nt),
                               constant_spec(0.5, 0.5, 0.5, 0.5, 0.0, 3.0),
                               herglotz::Lagrangian(L), 1.0, 0.0);
  GridFunction x1 = sample(p1.grid, [](double) { return 1.0; });

  GridFunction zm = solve_z_multi(pm, xf);
  GridFunction z1 = herglotz::solve_z(p1, x1);
  for (int it = 0; it <= nt; ++it) {
    CHECK(std::fabs(zm[it] - z1[it]) < 1e-9);
  }

  GridFunction lamm = lambda_profile_multi(pm, xf, zm);
  GridFunction lam1 = herglotz::lambda_profile(p1, x1, z1);
  const double T = pm.time_grid.node(200);
  MultiResiduals rm = el_residual_multi(pm, xf, zm, lamm, T);
  GridFunction r1 = herglotz::el_residual_interior(p1, x1, z1, lam1, T);
  for (int it = 0; it <= 200; ++it) {
    for (int fs : {0, 15, 30}) {
      CHECK(std::fabs(rm.interior.at(it, fs) - r1[it]) < 1e-9);
    }
  }
}
