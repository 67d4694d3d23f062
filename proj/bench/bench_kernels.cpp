// Compares the serial reference loops against the OpenMP profile kernels.
// Usage: fracvar_bench [n] [reps]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "fracvar/fracops.hpp"
#include "fracvar/threads.hpp"

using namespace fracvar;
using fracops::Exec;

namespace {

double time_ms(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(best,
                    std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void row(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s %10.2f ms %10.2f ms   x%.2f\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 3000;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 3;

  Grid grid(0.0, 3.0, n);
  GridFunction x = sample(grid, [](double t) { return std::sin(t) + 0.5 * t; });
  CombinedSpec const_spec = constant_spec(0.5, 0.5, 0.5, 0.5, 0.0, 3.0);
  CombinedSpec var_spec(OrderFunction("0.5 + 0.1*t/3", 0.0, 3.0),
                        OrderFunction("0.4 + 0.1*tau/3", 0.0, 3.0), 0.5, 0.5);

  std::printf("n = %d, threads = %d, best of %d\n\n", n, max_threads(), reps);
  std::printf("%-28s %13s %13s %8s\n", "kernel", "serial", "openmp", "speedup");

  {
    double s = time_ms(reps, [&] {
      fracops::caputo_profile(x, const_spec, Exec::Serial);
    });
    double p = time_ms(reps, [&] {
      fracops::caputo_profile(x, const_spec, Exec::Parallel);
    });
    row("caputo_profile (const)", s, p);
  }
  {
    double s = time_ms(reps, [&] {
      fracops::caputo_profile(x, var_spec, Exec::Serial);
    });
    double p = time_ms(reps, [&] {
      fracops::caputo_profile(x, var_spec, Exec::Parallel);
    });
    row("caputo_profile (variable)", s, p);
  }
  {
    double s = time_ms(reps, [&] {
      fracops::dual_rl_profile(x, const_spec, grid.n, Exec::Serial);
    });
    double p = time_ms(reps, [&] {
      fracops::dual_rl_profile(x, const_spec, grid.n, Exec::Parallel);
    });
    row("dual_rl_profile (const)", s, p);
  }
  {
    double s = time_ms(reps, [&] {
      fracops::left_rl_deriv_profile(x, var_spec.alpha, 0, Exec::Serial);
    });
    double p = time_ms(reps, [&] {
      fracops::left_rl_deriv_profile(x, var_spec.alpha, 0, Exec::Parallel);
    });
    row("left_rl_deriv (variable)", s, p);
  }
  return 0;
}
