// Compares the serial and OpenMP witness searches on planted-unstable pencils
// and checks that both return the same result.

#include <chrono>
#include <cstdio>

#include "ncstable/stability.hpp"

using namespace ncstable;

namespace {

LinearPencil planted_unstable(Eigen::Index delta, int d, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0xbe7c));
  LinearPencil core(d, delta, delta);
  core.coeff(0) = ComplexMatrix::Zero(delta, delta);
  core.coeff(0)(0, 0) = Complex(0, -1);
  ComplexMatrix g = random_gaussian(delta - 1, delta - 1, rng);
  core.coeff(0).bottomRightCorner(delta - 1, delta - 1) =
      random_hermitian(delta - 1, rng) + Complex(0, 1) * (g * g.adjoint());
  core.coeff(1)(0, 0) = 1.0;
  for (int j = 1; j <= d; ++j) {
    g = random_gaussian(delta - 1, delta - 1, rng);
    core.coeff(j).bottomRightCorner(delta - 1, delta - 1) = g * g.adjoint();
  }
  const ComplexMatrix P = random_gaussian(delta, delta, rng);
  const ComplexMatrix Q = random_gaussian(delta, delta, rng);
  return mul_right(mul_left(P, core), Q);
}

double run(const LinearPencil& L, bool parallel, long budget, std::uint64_t seed,
           bool& found) {
  ToleranceConfig cfg;
  WitnessOptions opts;
  opts.parallel = parallel;
  opts.budget = budget;
  opts.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  const auto w = find_witness(L, opts, cfg);
  const auto stop = std::chrono::steady_clock::now();
  found = w.has_value();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

}  // namespace

int main() {
  std::printf("%-28s %10s %12s %12s %9s\n", "instance", "budget", "serial[ms]", "openmp[ms]",
              "speedup");
  for (Eigen::Index delta : {3, 4, 5}) {
    for (long budget : {20000L, 60000L}) {
      const LinearPencil L = planted_unstable(delta, 2, 7u * static_cast<std::uint64_t>(delta));
      bool found_serial = false, found_parallel = false;
      const double ms_serial = run(L, false, budget, 1, found_serial);
      const double ms_parallel = run(L, true, budget, 1, found_parallel);
      if (found_serial != found_parallel) {
        std::printf("MISMATCH between serial and parallel results\n");
        return 1;
      }
      char name[64];
      std::snprintf(name, sizeof(name), "planted delta=%ld d=2 %s", static_cast<long>(delta),
                    found_serial ? "(found)" : "(none)");
      std::printf("%-28s %10ld %12.1f %12.1f %8.2fx\n", name, budget, ms_serial, ms_parallel,
                  ms_serial / ms_parallel);
    }
  }
  return 0;
}
