// Drives both the in-process command layer and the installed binary
// (FRACVAR_CLI_PATH) for exit-code and determinism contracts.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fracvar/cli.hpp"
#include "fracvar/gamma.hpp"

using namespace fracvar;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

fs::path temp_file(const std::string& name, const std::string& content) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p);
  out << content;
  return p;
}

RunResult run_binary(const std::string& args) {
  fs::path out_path = fs::temp_directory_path() / "fracvar_cli_out.txt";
  std::string cmd = std::string(FRACVAR_CLI_PATH) + " " + args + " > " +
                    out_path.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  int code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return {code, buf.str()};
}

const char* kOperatorConfig = R"ini(
[problem]
kind = operator
interval = 0 1

[orders]
alpha = "0.5"
beta = "0.5"

[operator]
op = left-caputo

[trajectory]
x = "t"
y = "1"

[grid]
n = 400
)ini";

}  // namespace

TEST_CASE("deriv tabulates the closed form") {
  config::ProblemConfig cfg = config::parse_config(kOperatorConfig);
  cli::Options opt;
  std::ostringstream out;
  CHECK(cli::cmd_deriv(cfg, opt, out) == 0);

  // column t,value; for x = t the left Caputo is t^0.5/Gamma(1.5)
  std::istringstream lines(out.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "t,value");
  std::string row;
  int checked = 0;
  while (std::getline(lines, row)) {
    auto comma = row.find(',');
    double t = std::stod(row.substr(0, comma));
    double val = std::stod(row.substr(comma + 1));
    CHECK(std::fabs(val - std::pow(t, 0.5) / gamma_fn(1.5)) < 1e-10);
    ++checked;
  }
  CHECK(checked == 401);
}

TEST_CASE("deriv of a constant trajectory is the zero column") {
  config::ProblemConfig cfg = config::parse_config(kOperatorConfig);
  cfg.x = "1";
  cli::Options opt;
  std::ostringstream out;
  CHECK(cli::cmd_deriv(cfg, opt, out) == 0);
  std::istringstream lines(out.str());
  std::string row;
  std::getline(lines, row);  // header
  while (std::getline(lines, row)) {
    double val = std::stod(row.substr(row.find(',') + 1));
    CHECK(val == 0.0);
  }
}

TEST_CASE("ibp-check reports residuals and orders") {
  config::ProblemConfig cfg = config::parse_config(kOperatorConfig);
  cfg.x = "t^2";
  cfg.y = "(1 - t)^2";
  cfg.n = 500;
  cli::Options opt;
  std::ostringstream out;
  CHECK(cli::cmd_ibp_check(cfg, opt, out) == 0);
  auto j = nlohmann::json::parse(out.str());
  CHECK(j["left_residual"].get<double>() < 5e-3);
  double ratio = j["left_residual"].get<double>() /
                 j["left_residual_refined"].get<double>();
  CHECK(ratio > 1.5);
  CHECK(ratio < 3.0);
}

TEST_CASE("verify pass and fail exit codes") {
  // the worked extremal of the second example verifies at T = 1
  const char* good = R"ini(
[problem]
kind = herglotz
interval = 0 3
x_a = 0
z_a = 0
T = 1

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
n = 1500
)ini";
  {
    std::ostringstream out;
    int code = cli::cmd_verify(config::parse_config(good), {}, out);
    CHECK(code == 0);
    auto j = nlohmann::json::parse(out.str());
    CHECK(j["pass"].get<bool>());
    CHECK(j["el_interior_norm"].get<double>() == 0.0);
  }
  // a non-extremal trajectory fails verification (exit 1)
  {
    std::string bad = good;
    auto pos = bad.find("x = \"0\"");
    bad.replace(pos, std::string("x = \"0\"").size(), "x = \"t\"");
    std::ostringstream out;
    int code = cli::cmd_verify(config::parse_config(bad), {}, out);
    CHECK(code == 1);
    auto j = nlohmann::json::parse(out.str());
    CHECK(!j["pass"].get<bool>());
  }
}

TEST_CASE("example commands reproduce the paper values") {
  cli::Options opt;
  opt.grid_override = 1500;  // keep the unit test quick; acceptance runs full size
  opt.csv_path = (fs::temp_directory_path() / "ex_z.csv").string();
  {
    std::ostringstream out;
    CHECK(cli::cmd_example("ex2", opt, out) == 0);
    auto j = nlohmann::json::parse(out.str());
    CHECK(std::fabs(j["T"].get<double>() - 1.0) < 1e-6);
    CHECK(std::fabs(j["z_at_T"].get<double>() - std::tan(-0.5)) < 1e-6);
  }
  {
    std::ostringstream out;
    CHECK(cli::cmd_example("ex3", opt, out) == 0);
    auto j = nlohmann::json::parse(out.str());
    CHECK(std::fabs(j["T"].get<double>() - 1.0) < 1e-6);
    CHECK(std::fabs(j["z_at_T"].get<double>() + 2.0 / 3.0) < 1e-6);
  }
  CHECK(fs::exists(opt.csv_path));
  CHECK_THROWS_AS(cli::cmd_example("ex9", opt, std::cout), ConfigError);
}

TEST_CASE("binary: config errors exit with 2 and name the section") {
  std::string bad = R"ini(
[problem]
kind = herglotz
interval = 0 3
x_a = 1
z_a = 0

[orders]
alpha = "1.2"
beta = "0.5"
gamma1 = 0.5
gamma2 = 0.5

[lagrangian]
L = "v^2 + z + t^2 - 1"

[trajectory]
x = "1"
)ini";
  fs::path cfg = temp_file("fracvar_bad_order.ini", bad);
  RunResult r = run_binary("verify --config " + cfg.string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("[orders]") != std::string::npos);

  RunResult missing = run_binary("verify --config /no/such/file.ini");
  CHECK(missing.exit_code == 2);

  RunResult usage = run_binary("frobnicate");
  CHECK(usage.exit_code == 2);
}

TEST_CASE("binary: identical runs are byte-identical") {
  std::string cfgtext = R"ini(
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
n = 800
)ini";
  fs::path cfg = temp_file("fracvar_det.ini", cfgtext);
  RunResult a = run_binary("verify --config " + cfg.string());
  RunResult b = run_binary("verify --config " + cfg.string());
  CHECK(a.exit_code == b.exit_code);
  CHECK(a.output == b.output);
  CHECK(!a.output.empty());

  // and under a different thread cap
  fs::path out1 = fs::temp_directory_path() / "fracvar_t1.json";
  fs::path out2 = fs::temp_directory_path() / "fracvar_t2.json";
  std::string base = std::string(FRACVAR_CLI_PATH) + " verify --config " +
                     cfg.string();
  CHECK(std::system(("FRACVAR_THREADS=1 " + base + " > " + out1.string()).c_str()) == 0);
  CHECK(std::system(("FRACVAR_THREADS=2 " + base + " > " + out2.string()).c_str()) == 0);
  std::ifstream f1(out1), f2(out2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
}

TEST_CASE("binary: solve-t") {
  std::string cfgtext = R"ini(
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
n = 2000
)ini";
  fs::path cfg = temp_file("fracvar_solvet.ini", cfgtext);
  RunResult r = run_binary("solve-t --config " + cfg.string());
  CHECK(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.output);
  CHECK(std::fabs(j["T"].get<double>() - 1.6783469900166607) < 1e-3);
}
