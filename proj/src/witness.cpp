#include <algorithm>
#include <cmath>

#include "ncstable/stability.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ncstable {

namespace {

constexpr double kImagFloor = 1e-6;   // keeps upper-mode iterates strictly interior
constexpr double kDiskMargin = 1e-9;  // keeps polydisk iterates strictly contractive

// Parameter vector -> matrix tuple. Upper mode: X_j = R_j + i(G_j G_j^* + floor I)
// from n^2 hermitian parameters and 2n^2 factor parameters per variable.
// Polydisk mode: raw complex entries, rescaled into the open disk when needed.
struct Chart {
  WitnessMode mode;
  int d;
  Eigen::Index n;

  Eigen::Index params_per_var() const {
    return mode == WitnessMode::Upper ? 3 * n * n : 2 * n * n;
  }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(d) * params_per_var(); }

  MatrixTuple tuple(const Eigen::VectorXd& theta) const {
    MatrixTuple X;
    X.X.reserve(static_cast<size_t>(d));
    Eigen::Index at = 0;
    for (int j = 0; j < d; ++j) {
      if (mode == WitnessMode::Upper) {
        ComplexMatrix R = ComplexMatrix::Zero(n, n);
        for (Eigen::Index r = 0; r < n; ++r) {
          R(r, r) = theta(at++);
          for (Eigen::Index c = r + 1; c < n; ++c) {
            const Complex e(theta(at), theta(at + 1));
            at += 2;
            R(r, c) = e;
            R(c, r) = std::conj(e);
          }
        }
        ComplexMatrix G(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
          for (Eigen::Index c = 0; c < n; ++c) {
            G(r, c) = Complex(theta(at), theta(at + 1));
            at += 2;
          }
        X.X.push_back(R + Complex(0, 1) * (G * G.adjoint() +
                                           kImagFloor * ComplexMatrix::Identity(n, n)));
      } else {
        ComplexMatrix M(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
          for (Eigen::Index c = 0; c < n; ++c) {
            M(r, c) = Complex(theta(at), theta(at + 1));
            at += 2;
          }
        const double norm = spectral_norm(M);
        if (norm >= 1.0 - kDiskMargin)
          M *= (1.0 - kDiskMargin) / norm;
        X.X.push_back(std::move(M));
      }
    }
    return X;
  }
};

struct RestartResult {
  bool found = false;
  MatrixTuple X;
};

// One seeded restart: gaussian start (scale cycles with the restart index),
// then coordinatewise descent with pattern acceleration and shrinking step,
// within a fixed evaluation allotment. Restarts that only creep along a
// shallow valley are abandoned early.
RestartResult run_restart(const LinearPencil& L, const Chart& chart, std::uint64_t seed,
                          long restart_index, long eval_cap, double tol) {
  RestartResult res;
  if (eval_cap <= 0) return res;
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  constexpr double kScales[4] = {0.25, 0.7, 1.5, 3.0};
  const double scale = kScales[restart_index % 4];
  Eigen::VectorXd theta(chart.dim());
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = scale * gauss(rng);

  long evals = 0;
  auto objective = [&](const Eigen::VectorXd& th) {
    ++evals;
    return min_singular_value(eval_pencil(L, chart.tuple(th)));
  };

  double best = objective(theta);
  double step = 0.8 * scale;
  int slow_sweeps = 0;
  while (best > tol && step > 1e-8 && evals < eval_cap && slow_sweeps < 4) {
    const double sweep_start = best;
    const Eigen::VectorXd before = theta;
    bool improved = false;
    for (Eigen::Index c = 0; c < theta.size() && evals < eval_cap; ++c) {
      for (double sgn : {+1.0, -1.0}) {
        Eigen::VectorXd trial = theta;
        trial(c) += sgn * step;
        const double value = objective(trial);
        if (value < best * (1.0 - 1e-12)) {
          theta = std::move(trial);
          best = value;
          improved = true;
          break;
        }
        if (evals >= eval_cap || best <= tol) break;
      }
      if (best <= tol) break;
    }
    if (best <= tol) break;
    if (improved) {
      // pattern moves: keep doubling along the sweep displacement
      Eigen::VectorXd dir = theta - before;
      while (evals < eval_cap && best > tol) {
        Eigen::VectorXd trial = theta + dir;
        const double value = objective(trial);
        if (value >= best * (1.0 - 1e-12)) break;
        theta = std::move(trial);
        best = value;
        dir *= 2.0;
      }
      slow_sweeps = (sweep_start - best) < 0.02 * sweep_start && best > 100.0 * tol
                        ? slow_sweeps + 1
                        : 0;
    } else {
      step *= 0.4;
    }
  }

  if (best <= tol) {
    res.found = true;
    res.X = chart.tuple(theta);
  }
  return res;
}

}  // namespace

std::optional<MatrixTuple> find_witness(const LinearPencil& L, const WitnessOptions& opts,
                                        const ToleranceConfig& cfg) {
  if (opts.budget <= 0) return std::nullopt;
  const Eigen::Index small_side = std::min(L.rows(), L.cols());
  int cap = opts.size_cap;
  if (cap <= 0)
    cap = static_cast<int>(opts.mode == WitnessMode::Upper
                               ? small_side
                               : static_cast<Eigen::Index>(L.vars()) * small_side);
  cap = std::max(cap, 1);
  if (L.vars() == 0) {
    // Constant pencil: rank deficiency is size-independent.
    cap = 1;
  }

  const double tol = cfg.residual_tol;
  // geometric budget split: witnesses usually live at small sizes
  double weight_total = 0.0;
  for (int n = 1; n <= cap; ++n) weight_total += std::pow(0.5, n);

  for (int n = 1; n <= cap; ++n) {
    const long per_size = std::max<long>(
        1, static_cast<long>(static_cast<double>(opts.budget) * std::pow(0.5, n) / weight_total));
    Chart chart{opts.mode, L.vars(), n};
    const long per_restart = std::min(
        per_size,
        std::min<long>(2500,
                       1 + 100 * static_cast<long>(std::max<Eigen::Index>(chart.dim(), 1))));
    const long restarts = std::max<long>(1, per_size / per_restart);

#ifdef _OPENMP
    const long chunk = opts.parallel ? std::max(1, 2 * omp_get_max_threads()) : 1;
#else
    const long chunk = 1;
#endif
    for (long base = 0; base < restarts; base += chunk) {
      const long hi = std::min(restarts, base + chunk);
      std::vector<RestartResult> results(static_cast<size_t>(hi - base));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) if (opts.parallel)
#endif
      for (long r = base; r < hi; ++r) {
        results[static_cast<size_t>(r - base)] =
            run_restart(L, chart,
                        mix_seed(opts.seed, 0x77, static_cast<std::uint64_t>(n),
                                 static_cast<std::uint64_t>(r)),
                        r, per_restart, tol);
      }
      for (auto& res : results)
        if (res.found) return std::move(res.X);
    }
  }
  return std::nullopt;
}

}  // namespace ncstable
