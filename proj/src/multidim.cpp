#include "fracvar/multidim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracvar/threads.hpp"

namespace fracvar::multidim {

Field::Field(Grid time_grid, std::vector<Grid> space_grids)
    : time_grid_(time_grid), space_grids_(std::move(space_grids)) {
  if (space_grids_.empty()) {
    throw GridError("field: needs at least one spatial axis");
  }
  const int n = static_cast<int>(space_grids_.size());
  strides_.assign(static_cast<std::size_t>(n), 1);
  for (int i = n - 2; i >= 0; --i) {
    strides_[static_cast<std::size_t>(i)] =
        strides_[static_cast<std::size_t>(i + 1)] *
        (space_grids_[static_cast<std::size_t>(i + 1)].n + 1);
  }
  spatial_size_ = strides_[0] * (space_grids_[0].n + 1);
  values_.assign(static_cast<std::size_t>(time_grid_.n + 1) * spatial_size_, 0.0);
}

std::vector<int> Field::unflatten(int fs) const {
  std::vector<int> idx(space_grids_.size());
  for (std::size_t i = 0; i < space_grids_.size(); ++i) {
    idx[i] = (fs / strides_[i]) % (space_grids_[i].n + 1);
  }
  return idx;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

MultiLagrangian::MultiLagrangian(dsl::ExprPtr expr, int axes, double fd_step)
    : expr_(std::move(expr)), axes_(axes), fd_step_(fd_step) {
  std::vector<std::string> layout;
  layout.push_back("t");
  for (int i = 1; i <= axes_; ++i) layout.push_back("s" + std::to_string(i));
  layout.push_back("x");
  layout.push_back("v");
  for (int i = 1; i <= axes_; ++i) layout.push_back("w" + std::to_string(i));
  layout.push_back("z");
  compiled_ = dsl::CompiledExpr(expr_, std::move(layout));
}

double MultiLagrangian::partial(int slot, std::span<double> args) const {
  const double saved = args[static_cast<std::size_t>(slot)];
  const double step = fd_step_ * std::max(1.0, std::fabs(saved));
  args[static_cast<std::size_t>(slot)] = saved + step;
  const double hi = compiled_(args);
  args[static_cast<std::size_t>(slot)] = saved - step;
  const double lo = compiled_(args);
  args[static_cast<std::size_t>(slot)] = saved;
  return (hi - lo) / (2.0 * step);
}

MultiProblem::MultiProblem(Grid time_grid_, std::vector<Grid> space_grids_,
                           CombinedSpec time_spec_,
                           std::vector<CombinedSpec> space_specs_,
                           MultiLagrangian lagrangian_, dsl::ExprPtr boundary_,
                           double z_a_, double fd_step_)
    : time_grid(time_grid_),
      space_grids(std::move(space_grids_)),
      time_spec(std::move(time_spec_)),
      space_specs(std::move(space_specs_)),
      lagrangian(std::move(lagrangian_)),
      boundary(std::move(boundary_)),
      z_a(z_a_),
      fd_step(fd_step_) {
  if (space_grids.size() != space_specs.size()) {
    throw Error("multidim: one combined spec per spatial axis required");
  }
  if (lagrangian.axes() != static_cast<int>(space_grids.size())) {
    throw Error("multidim: Lagrangian axis count does not match the grids");
  }
  if (time_grid.a != time_spec.alpha.a() || time_grid.b != time_spec.alpha.b()) {
    throw OrderError("multidim: time orders must live on the time interval");
  }
  for (std::size_t i = 0; i < space_grids.size(); ++i) {
    if (space_grids[i].a != space_specs[i].alpha.a() ||
        space_grids[i].b != space_specs[i].alpha.b()) {
      throw OrderError("multidim: axis " + std::to_string(i + 1) +
                       " orders must live on its spatial interval");
    }
  }
}

Field sample_field(const Grid& time_grid, const std::vector<Grid>& space_grids,
                   const dsl::ExprPtr& e) {
  Field f(time_grid, space_grids);
  std::vector<std::string> layout;
  layout.push_back("t");
  for (std::size_t i = 1; i <= space_grids.size(); ++i) {
    layout.push_back("s" + std::to_string(i));
  }
  dsl::CompiledExpr compiled(e, std::move(layout));
  std::vector<double> args(1 + space_grids.size());
  for (int it = 0; it <= time_grid.n; ++it) {
    args[0] = time_grid.node(it);
    for (int fs = 0; fs < f.spatial_size(); ++fs) {
      std::vector<int> idx = f.unflatten(fs);
      for (std::size_t i = 0; i < space_grids.size(); ++i) {
        args[i + 1] = space_grids[i].node(idx[i]);
      }
      f.at(it, fs) = compiled(args);
    }
  }
  return f;
}

std::vector<double> spatial_weights(const std::vector<Grid>& space_grids) {
  std::vector<int> strides(space_grids.size(), 1);
  for (int i = static_cast<int>(space_grids.size()) - 2; i >= 0; --i) {
    strides[static_cast<std::size_t>(i)] =
        strides[static_cast<std::size_t>(i + 1)] *
        (space_grids[static_cast<std::size_t>(i + 1)].n + 1);
  }
  int total = strides[0] * (space_grids[0].n + 1);
  std::vector<double> w(static_cast<std::size_t>(total), 1.0);
  for (int fs = 0; fs < total; ++fs) {
    for (std::size_t i = 0; i < space_grids.size(); ++i) {
      int idx = (fs / strides[i]) % (space_grids[i].n + 1);
      double wi = space_grids[i].h();
      if (idx == 0 || idx == space_grids[i].n) wi *= 0.5;
      w[static_cast<std::size_t>(fs)] *= wi;
    }
  }
  return w;
}

namespace {

template <class F>
void for_lines(int count, Exec exec, F&& f) {
  if (exec == Exec::Parallel) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic, 4) num_threads(fracvar::max_threads())
#endif
    for (int i = 0; i < count; ++i) f(i);
  } else {
    for (int i = 0; i < count; ++i) f(i);
  }
}

// Assembles the Lagrangian argument vector for node (it, fs).
struct ArgBuilder {
  const MultiProblem* p;
  const Field* x;
  const Field* v;
  const std::vector<Field>* w;
  const GridFunction* z;

  void fill(int it, int fs, std::vector<double>& args) const {
    const auto& sg = p->space_grids;
    args[0] = p->time_grid.node(it);
    std::vector<int> idx = x->unflatten(fs);
    for (std::size_t i = 0; i < sg.size(); ++i) {
      args[i + 1] = sg[i].node(idx[i]);
    }
    const int nslot = static_cast<int>(sg.size());
    args[static_cast<std::size_t>(nslot) + 1] = x->at(it, fs);
    args[static_cast<std::size_t>(nslot) + 2] = v->at(it, fs);
    for (std::size_t i = 0; i < sg.size(); ++i) {
      args[static_cast<std::size_t>(nslot) + 3 + i] = (*w)[i].at(it, fs);
    }
    args[static_cast<std::size_t>(2 * nslot) + 3] = (*z)[it];
  }
};

}  // namespace

Field axis_caputo_profile(const Field& f, Axis axis, const CombinedSpec& spec,
                          Exec exec) {
  Field out(f.time_grid(), f.space_grids());
  if (axis.value == Axis::kTime) {
    const int S = f.spatial_size();
    for_lines(S, exec, [&](int fs) {
      std::vector<double> line(static_cast<std::size_t>(f.time_grid().n) + 1);
      for (int it = 0; it <= f.time_grid().n; ++it) line[static_cast<std::size_t>(it)] = f.at(it, fs);
      GridFunction gf(f.time_grid(), std::move(line));
      GridFunction prof = fracops::caputo_profile(gf, spec, Exec::Serial);
      for (int it = 0; it <= f.time_grid().n; ++it) out.at(it, fs) = prof[it];
    });
    return out;
  }
  const int ax = axis.value;
  if (ax < 0 || ax >= f.axes()) {
    throw GridError("axis_caputo_profile: no such axis");
  }
  const Grid& sgrid = f.space_grids()[static_cast<std::size_t>(ax)];
  const int len = sgrid.n + 1;
  const int stride = f.stride(ax);
  const int S = f.spatial_size();
  const int lines_per_layer = S / len;
  const int total_lines = (f.time_grid().n + 1) * lines_per_layer;
  for_lines(total_lines, exec, [&](int line) {
    const int it = line / lines_per_layer;
    const int rem = line % lines_per_layer;
    const int outer = rem / stride;
    const int inner = rem % stride;
    const int base = outer * len * stride + inner;
    std::vector<double> vals(static_cast<std::size_t>(len));
    for (int k = 0; k < len; ++k) {
      vals[static_cast<std::size_t>(k)] = f.at(it, base + k * stride);
    }
    GridFunction gf(sgrid, std::move(vals));
    GridFunction prof = fracops::caputo_profile(gf, spec, Exec::Serial);
    for (int k = 0; k < len; ++k) out.at(it, base + k * stride) = prof[k];
  });
  return out;
}

void check_boundary(const MultiProblem& p, const Field& x) {
  std::vector<std::string> layout;
  layout.push_back("t");
  for (std::size_t i = 1; i <= p.space_grids.size(); ++i) {
    layout.push_back("s" + std::to_string(i));
  }
  dsl::CompiledExpr g(p.boundary, std::move(layout));
  std::vector<double> args(1 + p.space_grids.size());
  const int nt = p.time_grid.n;
  for (int it = 0; it <= nt; ++it) {
    const bool time_face = (it == 0 || it == nt);
    args[0] = p.time_grid.node(it);
    for (int fs = 0; fs < x.spatial_size(); ++fs) {
      std::vector<int> idx = x.unflatten(fs);
      bool on_boundary = time_face;
      for (std::size_t i = 0; i < p.space_grids.size() && !on_boundary; ++i) {
        on_boundary = (idx[i] == 0 || idx[i] == p.space_grids[i].n);
      }
      if (!on_boundary) continue;
      for (std::size_t i = 0; i < p.space_grids.size(); ++i) {
        args[i + 1] = p.space_grids[i].node(idx[i]);
      }
      const double expected = g(args);
      if (std::fabs(x.at(it, fs) - expected) > 1e-10) {
        throw GridError("field violates the boundary condition at t = " +
                        std::to_string(args[0]) +
                        " (|x - g| = " +
                        std::to_string(std::fabs(x.at(it, fs) - expected)) +
                        ")");
      }
    }
  }
}

namespace {

struct Profiles {
  Field v;
  std::vector<Field> w;
};

Profiles make_profiles(const MultiProblem& p, const Field& x, Exec exec) {
  Profiles out{axis_caputo_profile(x, Axis{Axis::kTime}, p.time_spec, exec), {}};
  for (int i = 0; i < x.axes(); ++i) {
    out.w.push_back(
        axis_caputo_profile(x, Axis{i}, p.space_specs[static_cast<std::size_t>(i)], exec));
  }
  return out;
}

// Spatial integral of L over Omega with the layers interpolated at time u.
double lagrangian_layer_integral(const MultiProblem& p, const Field& x,
                                 const Profiles& prof,
                                 const std::vector<double>& weights, double u,
                                 double zval) {
  const Grid& tg = p.time_grid;
  double pos = (u - tg.a) / (tg.b - tg.a) * tg.n;
  int k = static_cast<int>(pos);
  if (k < 0) k = 0;
  if (k >= tg.n) k = tg.n - 1;
  const double theta = (u - tg.node(k)) / tg.h();

  std::vector<double> args(static_cast<std::size_t>(p.lagrangian.arg_count()));
  args[0] = u;
  const int naxes = x.axes();
  double acc = 0.0;
  for (int fs = 0; fs < x.spatial_size(); ++fs) {
    std::vector<int> idx = x.unflatten(fs);
    for (int i = 0; i < naxes; ++i) {
      args[static_cast<std::size_t>(i) + 1] =
          p.space_grids[static_cast<std::size_t>(i)].node(idx[static_cast<std::size_t>(i)]);
    }
    auto lerp = [&](const Field& f) {
      return f.at(k, fs) + theta * (f.at(k + 1, fs) - f.at(k, fs));
    };
    args[static_cast<std::size_t>(naxes) + 1] = lerp(x);
    args[static_cast<std::size_t>(naxes) + 2] = lerp(prof.v);
    for (int i = 0; i < naxes; ++i) {
      args[static_cast<std::size_t>(naxes) + 3 + static_cast<std::size_t>(i)] =
          lerp(prof.w[static_cast<std::size_t>(i)]);
    }
    args[static_cast<std::size_t>(2 * naxes) + 3] = zval;
    acc += weights[static_cast<std::size_t>(fs)] * p.lagrangian.value(args);
  }
  if (!std::isfinite(acc)) {
    throw Error("multidim: non-finite spatial integral at t = " + std::to_string(u));
  }
  return acc;
}

}  // namespace

GridFunction solve_z_multi(const MultiProblem& p, const Field& x) {
  check_boundary(p, x);
  Profiles prof = make_profiles(p, x, Exec::Parallel);
  std::vector<double> weights = spatial_weights(p.space_grids);
  const Grid& tg = p.time_grid;
  const double h = tg.h();
  std::vector<double> z(static_cast<std::size_t>(tg.n) + 1);
  z[0] = p.z_a;
  auto rhs = [&](double u, double zv) {
    return lagrangian_layer_integral(p, x, prof, weights, u, zv);
  };
  for (int k = 0; k < tg.n; ++k) {
    const double t = tg.node(k);
    const double zk = z[static_cast<std::size_t>(k)];
    const double k1 = rhs(t, zk);
    const double k2 = rhs(t + 0.5 * h, zk + 0.5 * h * k1);
    const double k3 = rhs(t + 0.5 * h, zk + 0.5 * h * k2);
    const double k4 = rhs(t + h, zk + h * k3);
    z[static_cast<std::size_t>(k) + 1] =
        zk + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return GridFunction(tg, std::move(z));
}

GridFunction lambda_profile_multi(const MultiProblem& p, const Field& x,
                                  const GridFunction& z) {
  Profiles prof = make_profiles(p, x, Exec::Parallel);
  std::vector<double> weights = spatial_weights(p.space_grids);
  const Grid& tg = p.time_grid;
  ArgBuilder ab{&p, &x, &prof.v, &prof.w, &z};
  std::vector<double> args(static_cast<std::size_t>(p.lagrangian.arg_count()));
  std::vector<double> B(static_cast<std::size_t>(tg.n) + 1, 0.0);
  const int zslot = p.lagrangian.slot_z();
  for (int it = 0; it <= tg.n; ++it) {
    double acc = 0.0;
    for (int fs = 0; fs < x.spatial_size(); ++fs) {
      ab.fill(it, fs, args);
      acc += weights[static_cast<std::size_t>(fs)] *
             p.lagrangian.partial(zslot, args);
    }
    B[static_cast<std::size_t>(it)] = acc;
  }
  std::vector<double> lam(static_cast<std::size_t>(tg.n) + 1);
  lam[0] = 1.0;
  double cum = 0.0;
  for (int it = 1; it <= tg.n; ++it) {
    cum += 0.5 * tg.h() * (B[static_cast<std::size_t>(it - 1)] +
                           B[static_cast<std::size_t>(it)]);
    lam[static_cast<std::size_t>(it)] = std::exp(-cum);
  }
  return GridFunction(tg, std::move(lam));
}

MultiResiduals el_residual_multi(const MultiProblem& p, const Field& x,
                                 const GridFunction& z,
                                 const GridFunction& lambda, double T,
                                 Exec exec) {
  check_boundary(p, x);
  const Grid& tg = p.time_grid;
  const int iT = tg.index_of(T);
  if (iT < 1) throw GridError("el_residual_multi: T must exceed a");
  Profiles prof = make_profiles(p, x, exec);

  // Partial fields of L along the trajectory.
  const int S = x.spatial_size();
  Field dxL(tg, p.space_grids), dvL(tg, p.space_grids);
  std::vector<Field> dwL(static_cast<std::size_t>(x.axes()),
                         Field(tg, p.space_grids));
  {
    ArgBuilder ab{&p, &x, &prof.v, &prof.w, &z};
    std::vector<double> args(static_cast<std::size_t>(p.lagrangian.arg_count()));
    for (int it = 0; it <= tg.n; ++it) {
      for (int fs = 0; fs < S; ++fs) {
        ab.fill(it, fs, args);
        dxL.at(it, fs) = p.lagrangian.partial(p.lagrangian.slot_x(), args);
        dvL.at(it, fs) = lambda[it] * p.lagrangian.partial(p.lagrangian.slot_v(), args);
        for (int i = 0; i < x.axes(); ++i) {
          dwL[static_cast<std::size_t>(i)].at(it, fs) =
              lambda[it] * p.lagrangian.partial(p.lagrangian.slot_w(i), args);
        }
      }
    }
  }

  MultiResiduals out{Field(tg, p.space_grids), Field(tg, p.space_grids)};

  // dL/dx lambda + time dual of (lambda dL/dv), per spatial node.
  for_lines(S, exec, [&](int fs) {
    std::vector<double> wline(static_cast<std::size_t>(tg.n) + 1);
    for (int it = 0; it <= tg.n; ++it) wline[static_cast<std::size_t>(it)] = dvL.at(it, fs);
    GridFunction wgf(tg, std::move(wline));
    GridFunction dual = fracops::dual_rl_profile(wgf, p.time_spec, iT, Exec::Serial);
    for (int it = 0; it <= iT; ++it) {
      out.interior.at(it, fs) = dxL.at(it, fs) * lambda[it] + dual[it];
    }
    // tail: gamma2 (leftRL_a - leftRL_T)(lambda dL/dv) in the time direction
    if (p.time_spec.gamma2 != 0.0 && iT < tg.n) {
      GridFunction from_a =
          fracops::left_rl_deriv_profile(wgf, p.time_spec.beta, 0, Exec::Serial);
      GridFunction from_T =
          fracops::left_rl_deriv_profile(wgf, p.time_spec.beta, iT, Exec::Serial);
      for (int it = iT; it <= tg.n; ++it) {
        out.tail.at(it, fs) = p.time_spec.gamma2 * (from_a[it] - from_T[it]);
      }
    }
  });

  // Per-axis spatial duals (full spatial range, no free spatial boundary).
  for (int ax = 0; ax < x.axes(); ++ax) {
    const Grid& sgrid = p.space_grids[static_cast<std::size_t>(ax)];
    const int len = sgrid.n + 1;
    const int stride = x.stride(ax);
    const int lines_per_layer = S / len;
    const int total_lines = (iT + 1) * lines_per_layer;
    const CombinedSpec& sspec = p.space_specs[static_cast<std::size_t>(ax)];
    for_lines(total_lines, exec, [&](int line) {
      const int it = line / lines_per_layer;
      const int rem = line % lines_per_layer;
      const int outer = rem / stride;
      const int inner = rem % stride;
      const int base = outer * len * stride + inner;
      std::vector<double> vals(static_cast<std::size_t>(len));
      for (int k = 0; k < len; ++k) {
        vals[static_cast<std::size_t>(k)] =
            dwL[static_cast<std::size_t>(ax)].at(it, base + k * stride);
      }
      GridFunction wgf(sgrid, std::move(vals));
      GridFunction dual =
          fracops::dual_rl_profile(wgf, sspec, sgrid.n, Exec::Serial);
      for (int k = 0; k < len; ++k) {
        out.interior.at(it, base + k * stride) += dual[k];
      }
    });
  }
  return out;
}

MultiTransversality transversality_multi(const MultiProblem& p, const Field& x,
                                         const GridFunction& z,
                                         const GridFunction& lambda, double T) {
  check_boundary(p, x);
  const Grid& tg = p.time_grid;
  const int iT = tg.index_of(T);
  Profiles prof = make_profiles(p, x, Exec::Parallel);
  std::vector<double> weights = spatial_weights(p.space_grids);
  const int S = x.spatial_size();

  fracops::KernelOrder qa{&p.time_spec.alpha, true};
  fracops::KernelOrder qb{&p.time_spec.beta, true};

  MultiTransversality out;
  out.bracket.assign(static_cast<std::size_t>(S), 0.0);
  ArgBuilder ab{&p, &x, &prof.v, &prof.w, &z};
  std::vector<double> args(static_cast<std::size_t>(p.lagrangian.arg_count()));
  for (int fs = 0; fs < S; ++fs) {
    std::vector<double> wline(static_cast<std::size_t>(tg.n) + 1);
    for (int it = 0; it <= tg.n; ++it) {
      ab.fill(it, fs, args);
      wline[static_cast<std::size_t>(it)] =
          lambda[it] * p.lagrangian.partial(p.lagrangian.slot_v(), args);
    }
    GridFunction wgf(tg, std::move(wline));
    out.bracket[static_cast<std::size_t>(fs)] =
        p.time_spec.gamma1 * fracops::right_conv_at(wgf, qa, iT, iT) -
        p.time_spec.gamma2 * fracops::left_conv_at(wgf, qb, iT, iT);
    out.bracket_integral +=
        weights[static_cast<std::size_t>(fs)] * out.bracket[static_cast<std::size_t>(fs)];
    ab.fill(iT, fs, args);
    out.lagrangian_integral_at_T +=
        weights[static_cast<std::size_t>(fs)] * p.lagrangian.value(args);
  }
  return out;
}

herglotz::TerminalTime find_terminal_time_multi(const MultiProblem& p,
                                                const Field& x,
                                                double root_tol) {
  check_boundary(p, x);
  Profiles prof = make_profiles(p, x, Exec::Parallel);
  std::vector<double> weights = spatial_weights(p.space_grids);
  GridFunction z = solve_z_multi(p, x);
  const Grid& tg = p.time_grid;
  auto gfun = [&](double T) {
    return lagrangian_layer_integral(p, x, prof, weights, T, z.value_at(T));
  };
  std::vector<double> roots;
  double prev = gfun(tg.node(0));
  if (prev == 0.0) roots.push_back(tg.node(0));
  for (int j = 1; j <= tg.n; ++j) {
    double cur = gfun(tg.node(j));
    if (cur == 0.0) {
      roots.push_back(tg.node(j));
    } else if (prev != 0.0 && (prev < 0.0) != (cur < 0.0)) {
      double lo = tg.node(j - 1), hi = tg.node(j), glo = prev;
      double mid = 0.5 * (lo + hi);
      for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        double gm = gfun(mid);
        if (std::fabs(gm) < root_tol || (hi - lo) < 1e-10) break;
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(mid);
    }
    prev = cur;
  }
  herglotz::TerminalTime out;
  if (roots.empty()) {
    out.T = tg.b;
    out.z_at_T = z[tg.n];
    out.boundary = true;
    return out;
  }
  double best = roots.front();
  double best_z = z.value_at(best);
  for (double r : roots) {
    double zr = z.value_at(r);
    if (zr < best_z) {
      best = r;
      best_z = zr;
    }
  }
  out.T = best;
  out.z_at_T = best_z;
  return out;
}

MultiVerificationReport verify_multi(const MultiProblem& p, const Field& x,
                                     std::optional<double> T, double root_tol) {
  MultiVerificationReport rep;
  if (p.time_spec.degenerate()) rep.flags.push_back("degenerate-gamma");
  try {
    GridFunction z = solve_z_multi(p, x);
    GridFunction lambda = lambda_profile_multi(p, x, z);
    const Grid& tg = p.time_grid;

    double Tval;
    if (T) {
      Tval = *T;
      rep.z_at_T = z.value_at(Tval);
    } else {
      herglotz::TerminalTime tt = find_terminal_time_multi(p, x, root_tol);
      Tval = tt.T;
      rep.z_at_T = tt.z_at_T;
      if (tt.boundary) rep.flags.push_back("boundary");
    }
    rep.T = Tval;

    const int iT = std::max(
        1, std::min(tg.n, static_cast<int>(std::lround(
                              (Tval - tg.a) / (tg.b - tg.a) * tg.n))));
    const double Tnode = tg.node(iT);

    MultiResiduals res = el_residual_multi(p, x, z, lambda, Tnode);
    for (int it = 0; it <= iT; ++it) {
      for (int fs = 0; fs < x.spatial_size(); ++fs) {
        rep.el_interior_norm =
            std::max(rep.el_interior_norm, std::fabs(res.interior.at(it, fs)));
      }
    }
    for (int it = iT; it <= tg.n; ++it) {
      for (int fs = 0; fs < x.spatial_size(); ++fs) {
        rep.el_tail_norm =
            std::max(rep.el_tail_norm, std::fabs(res.tail.at(it, fs)));
      }
    }
    MultiTransversality tr = transversality_multi(p, x, z, lambda, Tnode);
    for (double b : tr.bracket) {
      rep.trans_field_norm = std::max(rep.trans_field_norm, std::fabs(b));
    }
    rep.trans_integral = tr.bracket_integral;

    Profiles prof = make_profiles(p, x, Exec::Parallel);
    std::vector<double> weights = spatial_weights(p.space_grids);
    rep.lagrangian_at_T =
        lagrangian_layer_integral(p, x, prof, weights, Tval, rep.z_at_T);
  } catch (const std::exception& e) {
    rep.flags.push_back(std::string("error: ") + e.what());
  }
  return rep;
}

}  // namespace fracvar::multidim
