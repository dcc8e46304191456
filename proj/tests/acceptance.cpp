// Acceptance suite: one check per shipped guarantee, each printing a PASS or
// FAIL line. Exit status is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <vector>

#include "ncstable/io.hpp"
#include "ncstable/realization.hpp"
#include "ncstable/transforms.hpp"

using namespace ncstable;
namespace fs = std::filesystem;

namespace {

const ToleranceConfig cfg;
int failures = 0;

void report(int index, const char* name, bool pass, const std::string& note = "") {
  std::printf("%s  criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", index, name,
              note.empty() ? "" : " -- ", note.c_str());
  if (!pass) ++failures;
}

LinearPencil scalar_pencil(Complex a0, Complex a1) {
  LinearPencil L(1, 1, 1);
  L.coeff(0)(0, 0) = a0;
  L.coeff(1)(0, 0) = a1;
  return L;
}

LinearPencil paper_example() {
  LinearPencil L(1, 2, 2);
  L.coeff(0) << 1, 0, 0, -1;
  L.coeff(1) << 2, -1, -1, 0;
  return L;
}

LinearPencil random_purely_stable(int d, Eigen::Index delta, Rng& rng) {
  for (;;) {
    LinearPencil L(d, delta, delta);
    std::uniform_int_distribution<Eigen::Index> rank(1, delta);
    std::bernoulli_distribution ridge(0.5);
    const ComplexMatrix H = random_hermitian(delta, rng);
    ComplexMatrix g = random_gaussian(delta, rank(rng), rng);
    L.coeff(0) = H + Complex(0, 1) * (g * g.adjoint() +
                                      (ridge(rng) ? 0.05 : 0.0) *
                                          ComplexMatrix::Identity(delta, delta));
    for (int j = 1; j <= d; ++j) {
      g = random_gaussian(delta, rank(rng), rng);
      L.coeff(j) = g * g.adjoint() +
                   (ridge(rng) ? 0.05 : 0.0) * ComplexMatrix::Identity(delta, delta);
    }
    std::vector<ComplexMatrix> stack{real_part(L.coeff(0)), imag_part(L.coeff(0))};
    for (int j = 1; j <= d; ++j) stack.push_back(L.coeff(j));
    if (joint_kernel(stack, cfg).cols() == 0) return L;
  }
}

LinearPencil planted_unstable(int d, Eigen::Index delta, Rng& rng) {
  LinearPencil core(d, delta, delta);
  core.coeff(0)(0, 0) = Complex(0, -1);
  core.coeff(1)(0, 0) = 1.0;
  if (delta > 1) {
    const LinearPencil junk = random_purely_stable(d, delta - 1, rng);
    for (int j = 0; j <= d; ++j)
      core.coeff(j).bottomRightCorner(delta - 1, delta - 1) = junk.coeff(j);
  }
  ComplexMatrix P, Q;
  do {
    P = random_gaussian(delta, delta, rng);
  } while (min_singular_value(P) < 0.1);
  do {
    Q = random_gaussian(delta, delta, rng);
  } while (min_singular_value(Q) < 0.1);
  return mul_right(mul_left(P, core), Q);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NCSTABLE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

// 1. Paper example: stable, assembled certificate verifies, and the
//    hand-encoded certificate passes the certify command.
void criterion_paper_example() {
  const LinearPencil L = paper_example();
  StabilityCertificate cert = check_stable(L, cfg);
  bool ok = cert.verdict == Verdict::Stable;
  std::string note;
  if (ok) {
    cert.triangular = assemble_triangular(L, cert);
    std::vector<std::string> reasons;
    ok = verify_certificate(L, cert, cfg, &reasons);
    if (!ok && !reasons.empty()) note = reasons.front();
  } else {
    note = "verdict " + std::string(to_string(cert.verdict));
  }

  if (ok) {
    const fs::path dir = fs::temp_directory_path() / "ncstable_acceptance";
    fs::create_directories(dir);
    const std::string pencil_path = (dir / "paper.json").string();
    io::write_json_file(pencil_path, io::pencil_to_json(L));

    StabilityCertificate hand;
    hand.verdict = Verdict::Stable;
    hand.triangular = StabilityCertificate::Triangular{};
    hand.triangular->D = ComplexMatrix(2, 2);
    hand.triangular->D << 1, 1, 1, 0;
    hand.triangular->E = ComplexMatrix(2, 2);
    hand.triangular->E << 1, 1, 0, 1;
    for (int b = 0; b < 2; ++b) {
      PurelyStableData blk;
      blk.H = ComplexMatrix::Constant(1, 1, 1.0);
      blk.P = {ComplexMatrix::Zero(1, 1), ComplexMatrix::Constant(1, 1, 1.0)};
      hand.triangular->blocks.push_back(blk);
    }
    const std::string cert_path = (dir / "paper_hand_cert.json").string();
    io::write_json_file(cert_path, io::certificate_to_json(hand, cfg));
    const int code = run_cli("certify " + pencil_path + " " + cert_path);
    if (code != 0) {
      ok = false;
      note = "hand-encoded certificate rejected by the certify command";
    }
  }
  report(1, "paper 2x2 example reproduction", ok, note);
}

// 2. Planted corpora: 100 purely stable -> stable with verifying
//    certificates; 100 planted unstable -> unstable, witnessed >= 95 times.
void criterion_corpora() {
  Rng rng(20240817);
  int stable_ok = 0;
  for (int i = 0; i < 100; ++i) {
    std::uniform_int_distribution<int> dd(1, 3);
    std::uniform_int_distribution<Eigen::Index> ds(1, 5);
    const LinearPencil L = random_purely_stable(dd(rng), ds(rng), rng);
    StabilityCertificate cert = check_stable(L, cfg);
    if (cert.verdict != Verdict::Stable) continue;
    cert.triangular = assemble_triangular(L, cert);
    if (verify_certificate(L, cert, cfg)) ++stable_ok;
  }
  report(2, "100/100 purely stable classified and certified", stable_ok == 100,
         std::to_string(stable_ok) + "/100");

  int unstable_ok = 0, witnessed = 0, sdp_refuted = 0;
  for (int i = 0; i < 100; ++i) {
    std::uniform_int_distribution<int> dd(1, 3);
    std::uniform_int_distribution<Eigen::Index> ds(1, 5);
    const LinearPencil L = planted_unstable(dd(rng), ds(rng), rng);
    const StabilityCertificate cert = check_stable(L, cfg);
    if (cert.verdict != Verdict::Unstable) continue;
    ++unstable_ok;
    WitnessOptions opts;
    opts.seed = 7000 + static_cast<std::uint64_t>(i);
    if (const auto w = find_witness(L, opts, cfg);
        w && min_singular_value(eval_pencil(L, *w)) <= cfg.residual_tol)
      ++witnessed;
    else if (cert.infeasible_stage >= 0 || !cert.detail.empty())
      ++sdp_refuted;  // the remainder still carries the SDP refutation
  }
  const bool pass = unstable_ok == 100 && witnessed >= 95 &&
                    witnessed + sdp_refuted == 100;
  report(2, "100/100 planted unstable, >= 95 witnessed", pass,
         std::to_string(unstable_ok) + " unstable, " + std::to_string(witnessed) +
             " witnessed");
}

// 3. Scalar sanity, exact expected verdicts.
void criterion_scalar_sanity() {
  bool ok = true;
  std::string note;
  const LinearPencil xm = scalar_pencil(Complex(0, -1), 1.0);
  if (check_stable(xm, cfg).verdict != Verdict::Unstable) {
    ok = false;
    note += "x1-i not unstable; ";
  }
  const auto w = find_witness(xm, WitnessMode::Upper, 20000, 0, cfg);
  if (!w || std::abs(w->X[0](0, 0) - Complex(0, 1)) > 1e-3) {
    ok = false;
    note += "x1-i witness is not i; ";
  }
  if (check_stable(scalar_pencil(Complex(0, 1), 1.0), cfg).verdict != Verdict::Stable) {
    ok = false;
    note += "x1+i not stable; ";
  }
  const StabilityCertificate schur_bad = check_schur(scalar_pencil(1.0, -2.0), cfg);
  if (schur_bad.verdict != Verdict::Unstable || !schur_bad.witness ||
      std::abs(schur_bad.witness->X[0](0, 0) - Complex(0.5)) > 1e-3) {
    ok = false;
    note += "1-2x1 Schur verdict or witness wrong; ";
  }
  if (check_schur(scalar_pencil(1.0, -0.5), cfg).verdict != Verdict::Stable) {
    ok = false;
    note += "1-0.5x1 not Schur stable; ";
  }
  if (check_hurwitz(scalar_pencil(1.0, 1.0), cfg).verdict != Verdict::Stable) {
    ok = false;
    note += "1+x1 not Hurwitz stable; ";
  }
  report(3, "scalar sanity verdicts", ok, note);
}

// 4. Determinantal representation of 1 - x1 x2.
void criterion_detrep() {
  NcPolynomial f(2);
  f.add_term({}, 1.0);
  f.add_term({1, 2}, -1.0);

  bool ok = true;
  std::string note;
  const PolyStabilityResult res = detrep(f, cfg, 0);
  double worst = 1.0;
  if (!res.rep || !is_purely_stable(res.rep->L, cfg) ||
      !verify_detrep(f, res.rep->L, {1, 2, 3, 4}, 50, 3, cfg, &worst) || worst > 1e-6) {
    ok = false;
    note += "pipeline representation failed (residual " + std::to_string(worst) + "); ";
  }

  LinearPencil hand(2, 4, 4);
  hand.coeff(0)(0, 0) = -1.0;
  hand.coeff(0)(1, 1) = 1.0;
  hand.coeff(0)(2, 3) = -1.0;
  hand.coeff(0)(3, 2) = -1.0;
  hand.coeff(1)(3, 3) = 1.0;
  hand.coeff(2)(2, 2) = 1.0;
  if (!verify_detrep(f, hand, {1, 2, 3, 4}, 50, 5, cfg)) {
    ok = false;
    note += "hand-derived representation rejected; ";
  }
  if (verify_detrep(f, block(hand, 2, 2, 2, 2), {1}, 10, 5, cfg)) {
    ok = false;
    note += "unpadded representation accepted at n=1; ";
  }
  report(4, "determinantal representation of 1 - x1 x2", ok, note);
}

// 5. Realization stack sizes and round trips.
void criterion_realization_stack() {
  NcPolynomial f(2);
  f.add_term({}, 1.0);
  f.add_term({1, 2}, -1.0);
  bool ok = minimize_realization(invert_realization(realize_poly(f)), cfg).size() == 2;
  std::string note = ok ? "" : "minimized inverse realization size != 2; ";

  Rng rng(5150);
  int good = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> dd(1, 3);
    const int d = dd(rng);
    NcPolynomial g(d);
    std::uniform_int_distribution<int> deg(0, 4);
    std::uniform_int_distribution<int> letter(1, d);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int t = 0; t < 5; ++t) {
      Word w;
      const int k = deg(rng);
      for (int i = 0; i < k; ++i) w.push_back(letter(rng));
      g.add_term(w, Complex(gauss(rng), gauss(rng)));
    }
    if (g.is_zero()) g.add_term({}, 1.0);
    std::uniform_int_distribution<Eigen::Index> nn(1, 3);
    const Eigen::Index n = nn(rng);
    MatrixTuple X;
    for (int j = 0; j < d; ++j) X.X.push_back(random_gaussian(n, n, rng));
    const ComplexMatrix a = eval_poly(g, X);
    const ComplexMatrix b = eval_realization(realize_poly(g), X);
    if ((a - b).norm() <= 1e-9 * (1.0 + a.norm())) ++good;
  }
  if (good != 50) {
    ok = false;
    note += std::to_string(good) + "/50 round trips; ";
  }
  report(5, "realization stack (Hankel size and 50 round trips)", ok, note);
}

// 6. Schur reduction equivalence on sampled points.
void criterion_schur_equivalence() {
  Rng rng(33550336);
  int agreements = 0;
  const int pencils = 50, points = 20;
  for (int i = 0; i < pencils; ++i) {
    std::uniform_int_distribution<int> dd(1, 2);
    std::uniform_int_distribution<Eigen::Index> ds(1, 3);
    const int d = dd(rng);
    const Eigen::Index n = ds(rng);
    LinearPencil L(d, n, n);
    do {
      for (int j = 0; j <= d; ++j) L.coeff(j) = random_gaussian(n, n, rng);
    } while (min_singular_value(L.coeff(0)) < 0.2);
    const auto red = schur_to_stable(L);
    if (!red) continue;
    for (int s = 0; s < points; ++s) {
      const MatrixTuple X =
          sample_upper_point(d, 1 + (s % 3), mix_seed(4242, i, s));
      const auto rank_ok = [&](const ComplexMatrix& M) {
        Eigen::JacobiSVD<ComplexMatrix> svd(M);
        const auto& sv = svd.singularValues();
        return sv(0) > 0.0 && sv(sv.size() - 1) > cfg.rank_tol * sv(0);
      };
      if (rank_ok(eval_pencil(*red, X)) == rank_ok(eval_pencil(L, cayley(X))))
        ++agreements;
    }
  }
  report(6, "Schur reduction equivalence on 50x20 samples", agreements == pencils * points,
         std::to_string(agreements) + "/" + std::to_string(pencils * points));
}

// 7. Hermitian fast path agreement.
void criterion_hermitian_agreement() {
  Rng rng(28980);
  int done = 0, agree = 0;
  while (done < 50) {
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<Eigen::Index> ds(2, 4);
    std::uniform_int_distribution<int> dd(1, 2);
    const Eigen::Index delta = ds(rng);
    const int d = dd(rng);
    LinearPencil L(d, delta, delta);
    if (const int k = kind(rng); k < 2) {
      L = random_purely_stable(d, delta, rng);
      L.coeff(0) = real_part(L.coeff(0));
      if (k == 1) L = -L;
    } else {
      L.coeff(0) = random_hermitian(delta, rng);
      for (int j = 1; j <= d; ++j) L.coeff(j) = random_hermitian(delta, rng);
    }
    if (!is_hermitian_pencil(L, 1e-10)) continue;
    try {
      if (!is_irreducible(L, cfg)) continue;
    } catch (const InputError&) {
      continue;
    }
    ++done;
    if (check_hermitian_stable(L, cfg).verdict == check_stable(L, cfg).verdict) ++agree;
  }
  report(7, "hermitian fast path agrees with the engine (50 pencils)", agree == 50,
         std::to_string(agree) + "/50");
}

// 8. Affine hermitian polynomials are stable; nonaffine hermitian candidates
//    are refuted with witnesses.
void criterion_theorem_affine() {
  Rng rng(1729);
  int affine_ok = 0;
  for (int i = 0; i < 20; ++i) {
    std::uniform_int_distribution<int> dd(1, 3);
    std::uniform_real_distribution<double> mag(0.0, 3.0);
    std::bernoulli_distribution flip(0.5);
    const int d = dd(rng);
    const double sign = flip(rng) ? 1.0 : -1.0;
    NcPolynomial f(d);
    f.add_term({}, 1.0);
    for (int j = 1; j <= d; ++j) f.add_term({j}, sign * mag(rng));
    const bool shortcut = affine_hermitian_check(f, cfg) == Verdict::Stable;
    const bool pipeline = check_stable_poly(f, cfg, 100 + i).verdict == Verdict::Stable;
    if (shortcut && pipeline) ++affine_ok;
  }

  // hermitian nonaffine candidates with planted upper-orthant zeros
  std::vector<NcPolynomial> candidates;
  auto herm2 = [&](Complex c12) {
    NcPolynomial f(2);
    f.add_term({}, 1.0);
    f.add_term({1, 2}, c12);
    f.add_term({2, 1}, std::conj(c12));
    return f;
  };
  candidates.push_back(herm2(1.0));
  candidates.push_back(herm2(3.0));
  {
    NcPolynomial f(1);
    f.add_term({}, 1.0);
    f.add_term({1, 1}, 1.0);
    candidates.push_back(f);  // 1 + x1^2
  }
  {
    NcPolynomial f(2);
    f.add_term({}, 1.0);
    f.add_term({2, 2}, 1.0);
    candidates.push_back(f);  // 1 + x2^2
  }
  {
    NcPolynomial f(2);
    f.add_term({}, 1.0);
    f.add_term({1, 1}, 1.0);
    f.add_term({2, 2}, 1.0);
    candidates.push_back(f);
  }
  {
    NcPolynomial f(2);
    f.add_term({}, 1.0);
    f.add_term({1, 2, 2, 1}, 1.0);
    candidates.push_back(f);
  }
  {
    NcPolynomial f(1);
    f.add_term({}, 1.0);
    f.add_term({1, 1, 1}, 1.0);
    candidates.push_back(f);  // 1 + x1^3
  }
  {
    NcPolynomial f(2);  // 1 + (x1 + x2)^2
    f.add_term({}, 1.0);
    f.add_term({1, 1}, 1.0);
    f.add_term({1, 2}, 1.0);
    f.add_term({2, 1}, 1.0);
    f.add_term({2, 2}, 1.0);
    candidates.push_back(f);
  }
  {
    NcPolynomial f(2);
    f.add_term({}, 1.0);
    f.add_term({1, 1}, 1.0);
    f.add_term({1, 2}, 1.0);
    f.add_term({2, 1}, 1.0);
    candidates.push_back(f);
  }
  {
    NcPolynomial f(2);
    f.add_term({}, 1.0);
    f.add_term({1, 1}, 2.0);
    f.add_term({1, 2}, 1.0);
    f.add_term({2, 1}, 1.0);
    candidates.push_back(f);
  }

  int refuted = 0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    const NcPolynomial& f = candidates[i];
    const StabilityCertificate cert = check_stable_poly(f, cfg, 500 + i);
    if (cert.verdict != Verdict::Unstable) continue;
    if (cert.witness &&
        min_singular_value(eval_poly(f, *cert.witness)) <= 10.0 * cfg.residual_tol) {
      ++refuted;
    }
  }
  const bool pass = affine_ok == 20 && refuted == 10;
  report(8, "affine hermitian stable (20), nonaffine refuted with witnesses (10)", pass,
         std::to_string(affine_ok) + "/20 affine, " + std::to_string(refuted) +
             "/10 refuted");
}

// 9. The partial-fraction generator only emits stable polynomials.
void criterion_generator() {
  Rng rng(40585);
  int stable = 0;
  for (int i = 0; i < 20; ++i) {
    std::uniform_int_distribution<int> ell_dist(1, 3);
    std::uniform_real_distribution<double> neg(-3.0, -0.1);
    std::uniform_real_distribution<double> real_pole(-2.0, 2.0);
    const int ell = ell_dist(rng);
    std::vector<double> alphas, betas;
    for (int k = 0; k < ell; ++k) {
      alphas.push_back(neg(rng));
      for (;;) {
        const double b = real_pole(rng);
        bool clash = false;
        for (double seen : betas) clash = clash || std::abs(seen - b) < 0.05;
        if (!clash) {
          betas.push_back(b);
          break;
        }
      }
    }
    const NcPolynomial f = gen_stable_poly(alphas, betas);
    if (check_stable_poly(f, cfg, 900 + i).verdict == Verdict::Stable) ++stable;
  }
  report(9, "gen_stable_poly outputs classified stable (20)", stable == 20,
         std::to_string(stable) + "/20");
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion_paper_example();
  criterion_corpora();
  criterion_scalar_sanity();
  criterion_detrep();
  criterion_realization_stack();
  criterion_schur_equivalence();
  criterion_hermitian_agreement();
  criterion_theorem_affine();
  criterion_generator();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d criterion(s) failed; total time %.1fs\n", failures, secs);
  return failures;
}
