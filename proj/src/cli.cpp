#include "fracvar/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracvar/threads.hpp"

namespace fracvar::cli {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kExample1 = R"ini(# z' = (Dx)^2 + z + t^2 - 1 on [0,3]
[problem]
kind = herglotz
interval = 0 3
x_a = 1
z_a = 0

[orders]
alpha = "0.5"
beta = "0.5"
gamma1 = 0.5
gamma2 = 0.5

[lagrangian]
L = "v^2 + z + t^2 - 1"

[trajectory]
x = "1"

[grid]
n = 3000
)ini";

constexpr const char* kExample2 = R"ini(# z' = (t-1)(x^2 + z^2 + 1) on [0,3]
[problem]
kind = herglotz
interval = 0 3
x_a = 0
z_a = 0

[orders]
alpha = "0.5"
beta = "0.5"
gamma1 = 0.5
gamma2 = 0.5

[lagrangian]
L = "(t - 1)*(x^2 + z^2 + 1)"

[trajectory]
x = "0"

[grid]
n = 3000
)ini";

// z' = (Dx - f(t))^2 + t^2 - 1 with the forcing that makes x(t) = t an
// extremal for alpha(t) = 0.5 + 0.1 t/3, beta = 0.5, gamma = (1/2, 1/2).
constexpr const char* kExample3 = R"ini(
[problem]
kind = herglotz
interval = 0 3
x_a = 0
z_a = 0

[orders]
alpha = "0.5 + 0.1*t/3"
beta = "0.5"
gamma1 = 0.5
gamma2 = 0.5

[lagrangian]
L = "(v - (t^(1 - (0.5 + 0.1*t/3))/(2*gamma(2 - (0.5 + 0.1*t/3))) - (3 - t)^0.5/(2*gamma(1.5))))^2 + t^2 - 1"

[trajectory]
x = "t"

[grid]
n = 3000
)ini";

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class OutputFile {
 public:
  // Opens `path` or falls back to the given stream.
  OutputFile(const std::string& path, std::ostream& fallback)
      : fallback_(fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) {
        throw Error("cannot open output file: " + path);
      }
    }
  }
  std::ostream& stream() { return file_ ? *file_ : fallback_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream& fallback_;
};

void apply_overrides(config::ProblemConfig& cfg, const Options& opt) {
  if (opt.grid_override > 0) cfg.n = opt.grid_override;
  if (opt.tol_given) {
    // command-line tolerance wins over the config's [tolerances] tol
  }
}

double effective_tol(const config::ProblemConfig& cfg, const Options& opt) {
  return opt.tol_given ? opt.tol : cfg.tol;
}

ordered_json report_json(const herglotz::VerificationReport& rep) {
  ordered_json j;
  j["T"] = rep.T;
  j["z_at_T"] = rep.z_at_T;
  j["el_interior_norm"] = rep.el_interior_norm;
  j["el_tail_norm"] = rep.el_tail_norm;
  j["trans_at_T"] = rep.trans_at_T;
  j["trans_at_b"] = rep.trans_at_b;
  j["lagrangian_at_T"] = rep.lagrangian_at_T;
  j["flags"] = rep.flags;
  return j;
}

bool has_error_flag(const std::vector<std::string>& flags) {
  for (const auto& f : flags) {
    if (f.rfind("error:", 0) == 0) return true;
  }
  return false;
}

bool herglotz_pass(const herglotz::VerificationReport& rep, double tol,
                   double b) {
  if (has_error_flag(rep.flags)) return false;
  bool ok = rep.el_interior_norm < tol && rep.el_tail_norm < tol &&
            std::fabs(rep.trans_at_T) < tol && std::fabs(rep.trans_at_b) < tol;
  bool boundary = false;
  for (const auto& f : rep.flags) boundary = boundary || f == "boundary";
  if (rep.T < b && !boundary) {
    ok = ok && std::fabs(rep.lagrangian_at_T) < tol;
  }
  return ok;
}

void write_profile_csv(std::ostream& os, const GridFunction& z) {
  os << "t,z\n";
  const Grid& g = z.grid();
  for (int j = 0; j <= g.n; ++j) {
    os << fmt17(g.node(j)) << ',' << fmt17(z[j]) << '\n';
  }
}

void write_residual_csv(std::ostream& os, const Grid& g, int iT,
                        const GridFunction& interior, const GridFunction& tail) {
  os << "t,region,residual\n";
  for (int j = 0; j <= iT; ++j) {
    os << fmt17(g.node(j)) << ",interior," << fmt17(interior[j]) << '\n';
  }
  for (int j = iT; j <= g.n; ++j) {
    os << fmt17(g.node(j)) << ",tail," << fmt17(tail[j]) << '\n';
  }
}

int verify_herglotz(const config::ProblemConfig& cfg, const Options& opt,
                    std::ostream& out) {
  herglotz::HerglotzProblem p = config::make_herglotz(cfg);
  GridFunction x = config::make_trajectory(cfg, cfg.x);
  herglotz::VerificationReport rep =
      herglotz::verify(p, x, cfg.T, cfg.root_tol);
  if (has_error_flag(rep.flags)) {
    OutputFile of(opt.out_path, out);
    of.stream() << report_json(rep).dump(2) << '\n';
    return 2;
  }
  const double tol = effective_tol(cfg, opt);
  bool pass = herglotz_pass(rep, tol, p.grid.b);
  ordered_json j = report_json(rep);
  j["tol"] = tol;
  j["pass"] = pass;
  OutputFile of(opt.out_path, out);
  of.stream() << j.dump(2) << '\n';
  if (!opt.csv_path.empty()) {
    const Grid& g = p.grid;
    const int iT = std::max(
        1, std::min(g.n, static_cast<int>(std::lround(
                              (rep.T - g.a) / (g.b - g.a) * g.n))));
    GridFunction v = herglotz::caputo_profile(p, x);
    GridFunction z = herglotz::solve_z(p, x, v);
    GridFunction lambda = herglotz::lambda_profile(p, x, v, z);
    GridFunction interior =
        herglotz::el_residual_interior(p, x, v, z, lambda, g.node(iT));
    GridFunction tail =
        herglotz::el_residual_tail(p, x, v, z, lambda, g.node(iT));
    std::ofstream csv(opt.csv_path);
    if (!csv) throw Error("cannot open CSV file: " + opt.csv_path);
    write_residual_csv(csv, g, iT, interior, tail);
  }
  return pass ? 0 : 1;
}

int verify_classic(const config::ProblemConfig& cfg, const Options& opt,
                   std::ostream& out) {
  classic::ClassicProblem p = config::make_classic(cfg);
  GridFunction x = config::make_trajectory(cfg, cfg.x);
  if (!cfg.T) {
    throw ConfigError("[problem] T: classic verification needs an explicit T");
  }
  const Grid& g = p.grid;
  const double T = g.node(g.index_of(*cfg.T));
  classic::ElResiduals res = classic::classic_el_residuals(p, x, T);
  classic::ClassicTransversality tr1 =
      classic::classic_transversality(p, x, T, classic::TransversalityForm::Teo1);
  classic::ClassicTransversality tr2 =
      classic::classic_transversality(p, x, T, classic::TransversalityForm::Teo2);
  const int iT = g.index_of(T);
  double interior_norm = 0.0, tail_norm = 0.0;
  for (int j = 0; j <= iT; ++j) {
    interior_norm = std::max(interior_norm, std::fabs(res.interior[j]));
  }
  for (int j = iT; j <= g.n; ++j) {
    tail_norm = std::max(tail_norm, std::fabs(res.tail[j]));
  }
  const double tol = effective_tol(cfg, opt);
  bool pass = interior_norm < tol && tail_norm < tol &&
              std::fabs(tr1.line1) < tol && std::fabs(tr1.line2) < tol &&
              std::fabs(tr1.line3) < tol;
  ordered_json j;
  j["T"] = T;
  j["functional"] = classic::eval_functional(p, x, T);
  j["el_interior_norm"] = interior_norm;
  j["el_tail_norm"] = tail_norm;
  j["trans_teo1"] = {tr1.line1, tr1.line2, tr1.line3};
  j["trans_teo2"] = {tr2.line1, tr2.line2, tr2.line3};
  j["tol"] = tol;
  j["pass"] = pass;
  OutputFile of(opt.out_path, out);
  of.stream() << j.dump(2) << '\n';
  if (!opt.csv_path.empty()) {
    std::ofstream csv(opt.csv_path);
    if (!csv) throw Error("cannot open CSV file: " + opt.csv_path);
    write_residual_csv(csv, g, iT, res.interior, res.tail);
  }
  return pass ? 0 : 1;
}

int verify_multidim(const config::ProblemConfig& cfg, const Options& opt,
                    std::ostream& out) {
  multidim::MultiProblem p = config::make_multidim(cfg);
  multidim::Field x = config::make_field(cfg, cfg.x);
  multidim::MultiVerificationReport rep =
      multidim::verify_multi(p, x, cfg.T, cfg.root_tol);
  ordered_json j;
  j["T"] = rep.T;
  j["z_at_T"] = rep.z_at_T;
  j["el_interior_norm"] = rep.el_interior_norm;
  j["el_tail_norm"] = rep.el_tail_norm;
  j["trans_field_norm"] = rep.trans_field_norm;
  j["trans_integral"] = rep.trans_integral;
  j["lagrangian_at_T"] = rep.lagrangian_at_T;
  j["flags"] = rep.flags;
  if (has_error_flag(rep.flags)) {
    OutputFile of(opt.out_path, out);
    of.stream() << j.dump(2) << '\n';
    return 2;
  }
  const double tol = effective_tol(cfg, opt);
  bool boundary = false;
  for (const auto& f : rep.flags) boundary = boundary || f == "boundary";
  bool pass = rep.el_interior_norm < tol && rep.el_tail_norm < tol &&
              rep.trans_field_norm < tol;
  if (rep.T < p.time_grid.b && !boundary) {
    pass = pass && std::fabs(rep.lagrangian_at_T) < tol;
  }
  j["tol"] = tol;
  j["pass"] = pass;
  OutputFile of(opt.out_path, out);
  of.stream() << j.dump(2) << '\n';
  return pass ? 0 : 1;
}

}  // namespace

const char* example_fixture(const std::string& name) {
  if (name == "ex1") return kExample1;
  if (name == "ex2") return kExample2;
  if (name == "ex3") return kExample3;
  throw ConfigError("unknown example '" + name + "' (expected ex1, ex2 or ex3)");
}

int cmd_deriv(config::ProblemConfig cfg, const Options& opt, std::ostream& out) {
  apply_overrides(cfg, opt);
  if (cfg.kind != config::Kind::Operator) {
    throw ConfigError("[problem] kind: deriv needs an operator config");
  }
  Grid grid(cfg.a, cfg.b, cfg.n);
  CombinedSpec spec(OrderFunction(cfg.alpha, cfg.a, cfg.b),
                    OrderFunction(cfg.beta, cfg.a, cfg.b), cfg.gamma1,
                    cfg.gamma2);
  GridFunction x = config::make_trajectory(cfg, cfg.x);

  GridFunction result = zeros(grid);
  const std::string& op = cfg.op;
  if (op == "left-rl-integral") {
    for (int j = 0; j <= grid.n; ++j) {
      result[j] = fracops::left_rl_integral(x, spec.alpha, grid.node(j));
    }
  } else if (op == "right-rl-integral") {
    for (int j = 0; j <= grid.n; ++j) {
      result[j] = fracops::right_rl_integral(x, spec.alpha, grid.node(j));
    }
  } else if (op == "left-caputo") {
    result = fracops::left_caputo_profile(x, spec.alpha);
  } else if (op == "right-caputo") {
    result = fracops::right_caputo_profile(x, spec.beta);
  } else if (op == "left-rl-deriv") {
    result = fracops::left_rl_deriv_profile(x, spec.alpha, 0);
  } else if (op == "right-rl-deriv") {
    result = fracops::right_rl_deriv_profile(x, spec.beta, grid.n);
  } else if (op == "combined-caputo") {
    result = fracops::caputo_profile(x, spec);
  } else if (op == "dual-rl") {
    int iT = cfg.T ? grid.index_of(*cfg.T) : grid.n;
    result = fracops::dual_rl_profile(x, spec, iT);
  } else {
    throw ConfigError("[operator] op: unknown operator '" + op + "'");
  }

  OutputFile of(opt.out_path, out);
  std::ostream& os = of.stream();
  os << "t,value\n";
  for (int j = 0; j <= grid.n; ++j) {
    os << fmt17(grid.node(j)) << ',' << fmt17(result[j]) << '\n';
  }
  return 0;
}

int cmd_verify(config::ProblemConfig cfg, const Options& opt, std::ostream& out) {
  apply_overrides(cfg, opt);
  switch (cfg.kind) {
    case config::Kind::Herglotz:
      return verify_herglotz(cfg, opt, out);
    case config::Kind::Classic:
      return verify_classic(cfg, opt, out);
    case config::Kind::Multidim:
      return verify_multidim(cfg, opt, out);
    case config::Kind::Operator:
      throw ConfigError("[problem] kind: verify needs a herglotz, classic or "
                        "multidim config");
  }
  return 2;
}

int cmd_solve_t(config::ProblemConfig cfg, const Options& opt,
                std::ostream& out) {
  apply_overrides(cfg, opt);
  ordered_json j;
  if (cfg.kind == config::Kind::Herglotz) {
    herglotz::HerglotzProblem p = config::make_herglotz(cfg);
    GridFunction x = config::make_trajectory(cfg, cfg.x);
    herglotz::TerminalTime tt =
        herglotz::find_terminal_time(p, x, cfg.root_tol);
    j["T"] = tt.T;
    j["z_at_T"] = tt.z_at_T;
    j["boundary"] = tt.boundary;
  } else if (cfg.kind == config::Kind::Multidim) {
    multidim::MultiProblem p = config::make_multidim(cfg);
    multidim::Field x = config::make_field(cfg, cfg.x);
    herglotz::TerminalTime tt =
        multidim::find_terminal_time_multi(p, x, cfg.root_tol);
    j["T"] = tt.T;
    j["z_at_T"] = tt.z_at_T;
    j["boundary"] = tt.boundary;
  } else {
    throw ConfigError("[problem] kind: solve-t needs a herglotz or multidim "
                      "config");
  }
  OutputFile of(opt.out_path, out);
  of.stream() << j.dump(2) << '\n';
  return 0;
}

int cmd_example(const std::string& name, const Options& opt, std::ostream& out) {
  config::ProblemConfig cfg = config::parse_config(example_fixture(name), name);
  apply_overrides(cfg, opt);
  herglotz::HerglotzProblem p = config::make_herglotz(cfg);
  GridFunction x = config::make_trajectory(cfg, cfg.x);
  herglotz::VerificationReport rep = herglotz::verify(p, x, std::nullopt,
                                                      cfg.root_tol);
  if (has_error_flag(rep.flags)) {
    OutputFile of(opt.out_path, out);
    of.stream() << report_json(rep).dump(2) << '\n';
    return 2;
  }
  GridFunction z = herglotz::solve_z(p, x);
  const std::string csv_path =
      opt.csv_path.empty() ? name + "_z.csv" : opt.csv_path;
  {
    std::ofstream csv(csv_path);
    if (!csv) throw Error("cannot open CSV file: " + csv_path);
    write_profile_csv(csv, z);
  }
  const double tol = effective_tol(cfg, opt);
  ordered_json j;
  j["example"] = name;
  j["T"] = rep.T;
  j["z_at_T"] = rep.z_at_T;
  j["el_interior_norm"] = rep.el_interior_norm;
  j["el_tail_norm"] = rep.el_tail_norm;
  j["trans_at_T"] = rep.trans_at_T;
  j["trans_at_b"] = rep.trans_at_b;
  j["lagrangian_at_T"] = rep.lagrangian_at_T;
  j["csv"] = csv_path;
  j["pass"] = herglotz_pass(rep, tol, p.grid.b);
  j["flags"] = rep.flags;
  OutputFile of(opt.out_path, out);
  of.stream() << j.dump(2) << '\n';
  return j["pass"].get<bool>() ? 0 : 1;
}

int cmd_ibp_check(config::ProblemConfig cfg, const Options& opt,
                  std::ostream& out) {
  apply_overrides(cfg, opt);
  if (cfg.kind != config::Kind::Operator) {
    throw ConfigError("[problem] kind: ibp-check needs an operator config");
  }
  if (cfg.y.empty()) {
    throw ConfigError("[trajectory] y: missing key (ibp-check needs two "
                      "trajectories)");
  }
  auto residuals_at = [&](int n) {
    Grid grid(cfg.a, cfg.b, n);
    OrderFunction alpha(cfg.alpha, cfg.a, cfg.b);
    GridFunction x = sample(grid, dsl::parse(cfg.x), "t");
    GridFunction y = sample(grid, dsl::parse(cfg.y), "t");
    double r1 = fracops::ibp_residual(x, y, alpha, fracops::IbpSide::LeftCaputo);
    double r2 = fracops::ibp_residual(x, y, alpha, fracops::IbpSide::RightCaputo);
    return std::pair<double, double>(r1, r2);
  };
  auto [r1, r2] = residuals_at(cfg.n);
  auto [r1f, r2f] = residuals_at(2 * cfg.n);
  auto order_of = [](double coarse, double fine) {
    if (coarse == 0.0 || fine == 0.0) return std::numeric_limits<double>::infinity();
    return std::log2(coarse / fine);
  };
  ordered_json j;
  j["n"] = cfg.n;
  j["left_residual"] = r1;
  j["right_residual"] = r2;
  j["left_residual_refined"] = r1f;
  j["right_residual_refined"] = r2f;
  j["left_order"] = order_of(r1, r1f);
  j["right_order"] = order_of(r2, r2f);
  OutputFile of(opt.out_path, out);
  of.stream() << j.dump(2) << '\n';
  return 0;
}

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"variable-order fractional Herglotz variational toolkit"};
  app.require_subcommand(1);

  Options opt;
  std::string example_name;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config) {
      sub->add_option("--config", opt.config_path, "problem config file")
          ->required();
    }
    sub->add_option("--out", opt.out_path, "write the report here");
    sub->add_option("--csv", opt.csv_path, "write profile CSV here");
    sub->add_option("--tol", opt.tol, "pass/fail tolerance")
        ->each([&](const std::string&) { opt.tol_given = true; });
    sub->add_option("--grid", opt.grid_override, "override the grid size");
    sub->add_flag("--json", opt.json, "JSON output where applicable");
  };

  CLI::App* deriv = app.add_subcommand("deriv", "tabulate a fractional operator");
  add_common(deriv, true);
  CLI::App* verify = app.add_subcommand("verify", "verify a candidate extremal");
  add_common(verify, true);
  CLI::App* solvet = app.add_subcommand("solve-t", "locate the terminal time");
  add_common(solvet, true);
  CLI::App* example = app.add_subcommand("example", "run a built-in example");
  example->add_option("name", example_name, "ex1, ex2 or ex3")->required();
  add_common(example, false);
  CLI::App* ibp = app.add_subcommand("ibp-check", "integration-by-parts residuals");
  add_common(ibp, true);

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    std::ostringstream dummy_out;
    int code = app.exit(e, dummy_out, err);
    // --help lands here with code 0; everything else is a usage error
    if (code == 0) {
      out << dummy_out.str();
      return 0;
    }
    return 2;
  }

  try {
    if (deriv->parsed()) {
      return cmd_deriv(config::load_problem(opt.config_path), opt, out);
    }
    if (verify->parsed()) {
      return cmd_verify(config::load_problem(opt.config_path), opt, out);
    }
    if (solvet->parsed()) {
      return cmd_solve_t(config::load_problem(opt.config_path), opt, out);
    }
    if (example->parsed()) {
      return cmd_example(example_name, opt, out);
    }
    if (ibp->parsed()) {
      return cmd_ibp_check(config::load_problem(opt.config_path), opt, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace fracvar::cli
