#include "fracvar/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fracvar::config {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

struct Ini {
  // section -> key -> value, with sections remembered for error messages
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string origin;

  bool has(const std::string& sec, const std::string& key) const {
    auto s = sections.find(sec);
    return s != sections.end() && s->second.count(key) > 0;
  }
  std::string get(const std::string& sec, const std::string& key) const {
    auto s = sections.find(sec);
    if (s == sections.end() || s->second.count(key) == 0) {
      throw ConfigError("[" + sec + "] " + key + ": missing key");
    }
    return s->second.at(key);
  }
  std::string get_or(const std::string& sec, const std::string& key,
                     const std::string& fallback) const {
    return has(sec, key) ? get(sec, key) : fallback;
  }
};

Ini parse_ini(std::string_view text, const std::string& origin) {
  Ini ini;
  ini.origin = origin;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(line_no) +
                          ": unterminated section header");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError(origin + ":" + std::to_string(line_no) +
                          ": empty section name");
      }
      ini.sections[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    if (section.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": key outside any section");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = unquote(trim(std::string_view(line).substr(eq + 1)));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    ini.sections[section][key] = value;
  }
  return ini;
}

double parse_number(const std::string& sec, const std::string& key,
                    const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (trim(std::string_view(value).substr(used)).empty()) return v;
  } catch (...) {
  }
  throw ConfigError("[" + sec + "] " + key + ": expected a number, got '" +
                    value + "'");
}

int parse_int(const std::string& sec, const std::string& key,
              const std::string& value) {
  double v = parse_number(sec, key, value);
  int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw ConfigError("[" + sec + "] " + key + ": expected an integer");
  }
  return i;
}

std::pair<double, double> parse_interval(const std::string& sec,
                                         const std::string& key,
                                         std::string value) {
  std::replace(value.begin(), value.end(), ',', ' ');
  std::istringstream in(value);
  double a = 0.0, b = 0.0;
  if (!(in >> a >> b)) {
    throw ConfigError("[" + sec + "] " + key +
                      ": expected two numbers (a b), got '" + value + "'");
  }
  std::string rest;
  if (in >> rest) {
    throw ConfigError("[" + sec + "] " + key + ": trailing input '" + rest + "'");
  }
  return {a, b};
}

// Parses the expression and checks its variables against the allowed set.
void check_expr(const std::string& sec, const std::string& key,
                const std::string& src, const std::set<std::string>& allowed) {
  dsl::ExprPtr e;
  try {
    e = dsl::parse(src);
  } catch (const Error& err) {
    throw ConfigError("[" + sec + "] " + key + ": " + err.what());
  }
  for (const std::string& v : dsl::free_vars(*e)) {
    if (allowed.count(v) == 0) {
      std::string names;
      for (const auto& a : allowed) {
        if (!names.empty()) names += ", ";
        names += a;
      }
      throw ConfigError("[" + sec + "] " + key + ": variable '" + v +
                        "' is not allowed (allowed: " + names + ")");
    }
  }
}

OrderFunction build_order(const std::string& key, const std::string& src,
                          double a, double b) {
  try {
    return OrderFunction(src, a, b);
  } catch (const Error& err) {
    throw ConfigError("[orders] " + key + ": " + err.what());
  }
}

const std::set<std::string> kOrderVars = {"t", "tau"};

std::set<std::string> multi_lagrangian_vars(int axes) {
  std::set<std::string> vars = {"t", "x", "v", "z"};
  for (int i = 1; i <= axes; ++i) {
    vars.insert("s" + std::to_string(i));
    vars.insert("w" + std::to_string(i));
  }
  return vars;
}

std::set<std::string> multi_spatial_vars(int axes) {
  std::set<std::string> vars = {"t"};
  for (int i = 1; i <= axes; ++i) vars.insert("s" + std::to_string(i));
  return vars;
}

void validate(ProblemConfig& cfg, const Ini& ini) {
  if (!(cfg.a < cfg.b)) {
    throw ConfigError("[problem] interval: requires a < b");
  }
  if (cfg.n < 2) {
    throw ConfigError("[grid] n: requires n >= 2");
  }
  const bool needs_orders = cfg.kind != Kind::Classic || true;
  if (needs_orders) {
    check_expr("orders", "alpha", cfg.alpha, kOrderVars);
    check_expr("orders", "beta", cfg.beta, kOrderVars);
    build_order("alpha", cfg.alpha, cfg.a, cfg.b);
    build_order("beta", cfg.beta, cfg.a, cfg.b);
  }
  if (!(cfg.gamma1 >= 0.0 && cfg.gamma1 <= 1.0)) {
    throw ConfigError("[orders] gamma1: must lie in [0,1]");
  }
  if (!(cfg.gamma2 >= 0.0 && cfg.gamma2 <= 1.0)) {
    throw ConfigError("[orders] gamma2: must lie in [0,1]");
  }

  switch (cfg.kind) {
    case Kind::Herglotz:
      check_expr("lagrangian", "L", cfg.lagrangian, {"t", "x", "v", "z"});
      check_expr("trajectory", "x", cfg.x, {"t"});
      break;
    case Kind::Classic:
      check_expr("lagrangian", "L", cfg.lagrangian, {"t", "x", "v"});
      check_expr("lagrangian", "phi", cfg.phi, {"T", "xT"});
      check_expr("trajectory", "x", cfg.x, {"t"});
      break;
    case Kind::Operator:
      check_expr("trajectory", "x", cfg.x, {"t"});
      if (!cfg.y.empty()) check_expr("trajectory", "y", cfg.y, {"t"});
      break;
    case Kind::Multidim: {
      const int axes = static_cast<int>(cfg.space.size());
      if (axes == 0) {
        throw ConfigError(
            "[problem] space_interval_s1: missing key (multidim needs at "
            "least one spatial axis)");
      }
      check_expr("lagrangian", "L", cfg.lagrangian, multi_lagrangian_vars(axes));
      check_expr("problem", "boundary", cfg.boundary, multi_spatial_vars(axes));
      check_expr("trajectory", "x", cfg.x, multi_spatial_vars(axes));
      for (int i = 0; i < axes; ++i) {
        const SpaceAxis& ax = cfg.space[static_cast<std::size_t>(i)];
        const std::string suffix = "_s" + std::to_string(i + 1);
        if (!(ax.a < ax.b)) {
          throw ConfigError("[problem] space_interval" + suffix +
                            ": requires a < b");
        }
        if (ax.n < 2) {
          throw ConfigError("[grid] n" + suffix + ": requires n >= 2");
        }
        check_expr("orders", "alpha" + suffix, ax.alpha, kOrderVars);
        check_expr("orders", "beta" + suffix, ax.beta, kOrderVars);
        build_order("alpha" + suffix, ax.alpha, ax.a, ax.b);
        build_order("beta" + suffix, ax.beta, ax.a, ax.b);
        if (!(ax.gamma1 >= 0.0 && ax.gamma1 <= 1.0) ||
            !(ax.gamma2 >= 0.0 && ax.gamma2 <= 1.0)) {
          throw ConfigError("[orders] gamma1" + suffix + "/gamma2" + suffix +
                            ": must lie in [0,1]");
        }
      }
      break;
    }
  }
  (void)ini;
}

}  // namespace

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::Herglotz:
      return "herglotz";
    case Kind::Classic:
      return "classic";
    case Kind::Multidim:
      return "multidim";
    case Kind::Operator:
      return "operator";
  }
  return "?";
}

ProblemConfig parse_config(std::string_view text, const std::string& origin) {
  Ini ini = parse_ini(text, origin);
  ProblemConfig cfg;

  std::string kind = ini.get("problem", "kind");
  if (kind == "herglotz") {
    cfg.kind = Kind::Herglotz;
  } else if (kind == "classic") {
    cfg.kind = Kind::Classic;
  } else if (kind == "multidim") {
    cfg.kind = Kind::Multidim;
  } else if (kind == "operator") {
    cfg.kind = Kind::Operator;
  } else {
    throw ConfigError("[problem] kind: unknown kind '" + kind +
                      "' (expected herglotz, classic, multidim or operator)");
  }

  std::tie(cfg.a, cfg.b) =
      parse_interval("problem", "interval", ini.get("problem", "interval"));
  cfg.n = ini.has("grid", "n") ? parse_int("grid", "n", ini.get("grid", "n"))
                               : 1000;

  cfg.alpha = ini.get_or("orders", "alpha", "0.5");
  cfg.beta = ini.get_or("orders", "beta", "0.5");
  if (cfg.kind == Kind::Herglotz || cfg.kind == Kind::Classic ||
      cfg.kind == Kind::Multidim) {
    cfg.gamma1 = parse_number("orders", "gamma1", ini.get("orders", "gamma1"));
    cfg.gamma2 = parse_number("orders", "gamma2", ini.get("orders", "gamma2"));
  } else {
    cfg.gamma1 =
        parse_number("orders", "gamma1", ini.get_or("orders", "gamma1", "0.5"));
    cfg.gamma2 =
        parse_number("orders", "gamma2", ini.get_or("orders", "gamma2", "0.5"));
  }

  if (cfg.kind == Kind::Herglotz || cfg.kind == Kind::Classic ||
      cfg.kind == Kind::Multidim) {
    cfg.lagrangian = ini.get("lagrangian", "L");
  }
  cfg.phi = ini.get_or("lagrangian", "phi", "0");
  if (ini.has("lagrangian", "fd_step")) {
    cfg.fd_step = parse_number("lagrangian", "fd_step",
                               ini.get("lagrangian", "fd_step"));
  }

  cfg.x = ini.get_or("trajectory", "x", "");
  cfg.y = ini.get_or("trajectory", "y", "");
  if (cfg.x.empty()) {
    throw ConfigError("[trajectory] x: missing key");
  }

  if (cfg.kind == Kind::Herglotz || cfg.kind == Kind::Classic) {
    cfg.x_a = parse_number("problem", "x_a", ini.get("problem", "x_a"));
  }
  if (cfg.kind == Kind::Herglotz || cfg.kind == Kind::Multidim) {
    cfg.z_a = parse_number("problem", "z_a", ini.get("problem", "z_a"));
  }

  if (ini.has("problem", "T")) {
    std::string tval = ini.get("problem", "T");
    if (tval != "auto") {
      cfg.T = parse_number("problem", "T", tval);
    }
  } else if (cfg.kind == Kind::Classic) {
    throw ConfigError("[problem] T: missing key (classic problems need an "
                      "explicit terminal time)");
  }

  if (cfg.kind == Kind::Operator) {
    cfg.op = ini.get("operator", "op");
  }

  if (ini.has("tolerances", "tol")) {
    cfg.tol = parse_number("tolerances", "tol", ini.get("tolerances", "tol"));
  }
  if (ini.has("tolerances", "root_tol")) {
    cfg.root_tol =
        parse_number("tolerances", "root_tol", ini.get("tolerances", "root_tol"));
  }

  if (cfg.kind == Kind::Multidim) {
    cfg.boundary = ini.get("problem", "boundary");
    for (int i = 1; i <= 9; ++i) {
      const std::string suffix = "_s" + std::to_string(i);
      if (!ini.has("problem", "space_interval" + suffix)) break;
      SpaceAxis ax;
      std::tie(ax.a, ax.b) =
          parse_interval("problem", "space_interval" + suffix,
                         ini.get("problem", "space_interval" + suffix));
      ax.n = ini.has("grid", "n" + suffix)
                 ? parse_int("grid", "n" + suffix, ini.get("grid", "n" + suffix))
                 : 100;
      ax.alpha = ini.get_or("orders", "alpha" + suffix, "0.5");
      ax.beta = ini.get_or("orders", "beta" + suffix, "0.5");
      ax.gamma1 = parse_number("orders", "gamma1" + suffix,
                               ini.get("orders", "gamma1" + suffix));
      ax.gamma2 = parse_number("orders", "gamma2" + suffix,
                               ini.get("orders", "gamma2" + suffix));
      cfg.space.push_back(ax);
    }
  }

  validate(cfg, ini);
  return cfg;
}

ProblemConfig load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

namespace {

CombinedSpec build_spec(const ProblemConfig& cfg) {
  return CombinedSpec(build_order("alpha", cfg.alpha, cfg.a, cfg.b),
                      build_order("beta", cfg.beta, cfg.a, cfg.b), cfg.gamma1,
                      cfg.gamma2);
}

}  // namespace

herglotz::HerglotzProblem make_herglotz(const ProblemConfig& cfg) {
  return herglotz::HerglotzProblem(
      Grid(cfg.a, cfg.b, cfg.n), build_spec(cfg),
      herglotz::Lagrangian(cfg.lagrangian, cfg.fd_step), cfg.x_a, cfg.z_a);
}

classic::ClassicProblem make_classic(const ProblemConfig& cfg) {
  return classic::ClassicProblem(
      Grid(cfg.a, cfg.b, cfg.n), build_spec(cfg),
      classic::Lagrangian3(cfg.lagrangian, cfg.fd_step),
      classic::TerminalCost(cfg.phi, cfg.fd_step), cfg.x_a);
}

multidim::MultiProblem make_multidim(const ProblemConfig& cfg) {
  std::vector<Grid> sgrids;
  std::vector<CombinedSpec> sspecs;
  for (std::size_t i = 0; i < cfg.space.size(); ++i) {
    const SpaceAxis& ax = cfg.space[i];
    const std::string suffix = "_s" + std::to_string(i + 1);
    sgrids.emplace_back(ax.a, ax.b, ax.n);
    sspecs.emplace_back(build_order("alpha" + suffix, ax.alpha, ax.a, ax.b),
                        build_order("beta" + suffix, ax.beta, ax.a, ax.b),
                        ax.gamma1, ax.gamma2);
  }
  return multidim::MultiProblem(
      Grid(cfg.a, cfg.b, cfg.n), std::move(sgrids), build_spec(cfg),
      std::move(sspecs),
      multidim::MultiLagrangian(dsl::parse(cfg.lagrangian),
                                static_cast<int>(cfg.space.size()), cfg.fd_step),
      dsl::parse(cfg.boundary), cfg.z_a, cfg.fd_step);
}

GridFunction make_trajectory(const ProblemConfig& cfg, const std::string& src) {
  return sample(Grid(cfg.a, cfg.b, cfg.n), dsl::parse(src), "t");
}

multidim::Field make_field(const ProblemConfig& cfg, const std::string& src) {
  std::vector<Grid> sgrids;
  for (const SpaceAxis& ax : cfg.space) sgrids.emplace_back(ax.a, ax.b, ax.n);
  return multidim::sample_field(Grid(cfg.a, cfg.b, cfg.n), sgrids,
                                dsl::parse(src));
}

}  // namespace fracvar::config
