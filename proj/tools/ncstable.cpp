#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "ncstable/io.hpp"
#include "ncstable/realization.hpp"
#include "ncstable/transforms.hpp"

namespace {

using namespace ncstable;
using io::Json;

constexpr int kExitStable = 0;
constexpr int kExitUnstable = 1;
constexpr int kExitIndeterminate = 2;
constexpr int kExitInputError = 3;

struct Common {
  std::string out_path;
  bool json = false;
  std::uint64_t seed = 0;
  double tol_rank = -1, tol_psd = -1, tol_residual = -1, tol_sdp = -1;

  void attach(CLI::App* cmd, bool with_seed = true) {
    cmd->add_option("--out", out_path, "write the certificate/result JSON here");
    cmd->add_flag("--json", json, "print the machine-readable report to stdout");
    if (with_seed) cmd->add_option("--seed", seed, "random seed (echoed into outputs)")->default_val(0);
    cmd->add_option("--tol-rank", tol_rank, "relative rank threshold");
    cmd->add_option("--tol-psd", tol_psd, "eigenvalue floor for definiteness tests");
    cmd->add_option("--tol-residual", tol_residual, "verification residual tolerance");
    cmd->add_option("--tol-sdp", tol_sdp, "SDP stopping tolerance");
  }

  ToleranceConfig tolerances() const {
    ToleranceConfig cfg = ToleranceConfig::from_env();  // env beats defaults
    if (tol_rank >= 0) cfg.rank_tol = tol_rank;         // flags beat env
    if (tol_psd >= 0) cfg.psd_tol = tol_psd;
    if (tol_residual >= 0) cfg.residual_tol = tol_residual;
    if (tol_sdp >= 0) cfg.sdp_tol = tol_sdp;
    return cfg;
  }
};

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Stable: return kExitStable;
    case Verdict::Unstable: return kExitUnstable;
    default: return kExitIndeterminate;
  }
}

void print_human(const StabilityCertificate& cert) {
  std::cout << "verdict: " << to_string(cert.verdict) << "\n";
  if (cert.transposed) std::cout << "note: decided on the transposed pencil\n";
  if (!cert.stages.empty()) std::cout << "stages: " << cert.stages.size() << "\n";
  if (cert.triangular) {
    std::cout << "triangular blocks:";
    for (const auto& b : cert.triangular->blocks) std::cout << " " << b.H.rows();
    std::cout << "\n";
  }
  if (cert.witness) {
    std::cout << "witness: tuple of size " << cert.witness->size() << "\n";
    for (int j = 0; j < cert.witness->vars(); ++j) {
      std::cout << "  X_" << (j + 1) << " =";
      const auto& x = cert.witness->X[static_cast<size_t>(j)];
      for (Eigen::Index r = 0; r < x.rows(); ++r) {
        std::cout << (r == 0 ? " [" : "; ");
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
          const Complex z = x(r, c);
          std::printf("%s%.6g%+.6gi", c == 0 ? "" : ", ", z.real(), z.imag());
        }
      }
      std::cout << "]\n";
    }
  }
  if (!cert.detail.empty()) std::cout << "detail: " << cert.detail << "\n";
  std::cout << "seed: " << cert.seed << "\n";
}

int finish_verdict(const StabilityCertificate& cert, const Common& common,
                   const ToleranceConfig& cfg) {
  const Json j = io::certificate_to_json(cert, cfg);
  if (!common.out_path.empty()) io::write_json_file(common.out_path, j);
  if (common.json)
    std::cout << io::canonical_dump(j);
  else
    print_human(cert);
  return exit_code(cert.verdict);
}

StabilityCertificate decide_pencil(const LinearPencil& L, const std::string& kind,
                                   const ToleranceConfig& cfg, std::uint64_t seed) {
  StabilityCertificate cert;
  std::optional<LinearPencil> engine = L;
  if (kind == "hurwitz") {
    cert = check_hurwitz(L, cfg, seed);
    engine = hurwitz_to_stable(L);
  } else if (kind == "schur") {
    cert = check_schur(L, cfg, seed);
    engine = schur_to_stable(L);
  } else {
    cert = check_stable(L, cfg);
    cert.seed = seed;
    if (cert.verdict == Verdict::Unstable) {
      WitnessOptions opts;
      opts.seed = seed;
      if (auto w = find_witness(L, opts, cfg)) cert.witness = std::move(w);
    }
  }
  if (cert.verdict == Verdict::Stable && engine && !cert.stages.empty()) {
    cert.triangular = assemble_triangular(*engine, cert);
    std::vector<std::string> reasons;
    if (!verify_certificate_for(L, cert, cfg, &reasons)) {
      cert.verdict = Verdict::Indeterminate;
      cert.detail = "self-verification failed";
      for (const auto& r : reasons) cert.detail += "; " + r;
      cert.triangular.reset();
    }
  }
  return cert;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stability of linear matrix pencils and noncommutative polynomials "
               "on matricial domains"};
  app.require_subcommand(1);

  std::string in_path, second_path;

  // check / hurwitz / schur
  Common c_check, c_hurwitz, c_schur, c_roesser, c_detrep, c_witness, c_certify, c_eval, c_gen;
  auto* cmd_check = app.add_subcommand("check", "decide stability on the matricial positive orthant");
  cmd_check->add_option("pencil", in_path, "pencil JSON file")->required();
  c_check.attach(cmd_check);

  auto* cmd_hurwitz = app.add_subcommand("hurwitz", "decide Hurwitz stability (positive real parts)");
  cmd_hurwitz->add_option("pencil", in_path, "pencil JSON file")->required();
  c_hurwitz.attach(cmd_hurwitz);

  auto* cmd_schur = app.add_subcommand("schur", "decide Schur stability (noncommutative polydisk)");
  cmd_schur->add_option("pencil", in_path, "pencil JSON file")->required();
  c_schur.attach(cmd_schur);

  auto* cmd_roesser = app.add_subcommand("roesser", "Schur-stability relaxation of a Roesser model");
  cmd_roesser->add_option("spec", in_path, "JSON file with {\"A\": matrix, \"dims\": [...]}")->required();
  c_roesser.attach(cmd_roesser);
  std::string emit_pencil_path;
  cmd_roesser->add_option("--emit-pencil", emit_pencil_path, "also write the derived pencil here");

  auto* cmd_detrep = app.add_subcommand("detrep", "purely stable determinantal representation of a polynomial");
  cmd_detrep->add_option("poly", in_path, "polynomial JSON file")->required();
  c_detrep.attach(cmd_detrep);
  std::vector<int> detrep_sizes{1, 2, 3, 4};
  int detrep_samples = 50;
  cmd_detrep->add_option("--sizes", detrep_sizes, "matrix sizes for the sampled determinant check")
      ->delimiter(',');
  cmd_detrep->add_option("--samples", detrep_samples, "samples per size");

  auto* cmd_witness = app.add_subcommand("witness", "search for a rank-dropping tuple");
  cmd_witness->add_option("pencil", in_path, "pencil JSON file")->required();
  c_witness.attach(cmd_witness);
  std::string witness_mode = "upper";
  long witness_budget = 20000;
  int witness_cap = 0;
  bool witness_serial = false;
  cmd_witness->add_option("--mode", witness_mode, "upper | polydisk")
      ->check(CLI::IsMember({"upper", "polydisk"}));
  cmd_witness->add_option("--budget", witness_budget, "objective evaluation budget");
  cmd_witness->add_option("--size-cap", witness_cap, "largest tuple size to try (0: theory bound)");
  cmd_witness->add_flag("--serial", witness_serial, "disable the parallel restarts");

  auto* cmd_certify = app.add_subcommand("certify", "re-verify a certificate against a pencil");
  cmd_certify->add_option("pencil", in_path, "pencil JSON file")->required();
  cmd_certify->add_option("certificate", second_path, "certificate JSON file")->required();
  c_certify.attach(cmd_certify, false);

  auto* cmd_eval = app.add_subcommand("eval", "evaluate a pencil or polynomial at a tuple");
  cmd_eval->add_option("object", in_path, "pencil or polynomial JSON file")->required();
  cmd_eval->add_option("tuple", second_path, "tuple JSON file {\"n\":..., \"X\":[...]}")->required();
  c_eval.attach(cmd_eval, false);

  auto* cmd_gen = app.add_subcommand("gen", "generate corpus instances");
  std::vector<double> gen_alphas, gen_betas;
  std::vector<Eigen::Index> gen_ps;
  cmd_gen->add_option("--alphas", gen_alphas, "negative residues of the partial fraction datum");
  cmd_gen->add_option("--betas", gen_betas, "distinct real poles");
  cmd_gen->add_option("--purely-stable", gen_ps, "SIZE VARS: random purely stable pencil")
      ->expected(2);
  c_gen.attach(cmd_gen);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_check->parsed() || cmd_hurwitz->parsed() || cmd_schur->parsed()) {
      const Common& common = cmd_check->parsed() ? c_check : cmd_hurwitz->parsed() ? c_hurwitz : c_schur;
      const std::string kind = cmd_check->parsed() ? "stable" : cmd_hurwitz->parsed() ? "hurwitz" : "schur";
      const ToleranceConfig cfg = common.tolerances();
      const LinearPencil L = io::pencil_from_json(io::read_json_file(in_path));
      return finish_verdict(decide_pencil(L, kind, cfg, common.seed), common, cfg);
    }

    if (cmd_roesser->parsed()) {
      const ToleranceConfig cfg = c_roesser.tolerances();
      const RoesserSpec spec = io::roesser_from_json(io::read_json_file(in_path));
      if (!emit_pencil_path.empty())
        io::write_json_file(emit_pencil_path, io::pencil_to_json(roesser_pencil(spec)));
      return finish_verdict(check_roesser(spec, cfg, c_roesser.seed), c_roesser, cfg);
    }

    if (cmd_detrep->parsed()) {
      const ToleranceConfig cfg = c_detrep.tolerances();
      const NcPolynomial f = io::poly_from_json(io::read_json_file(in_path));
      PolyStabilityResult result = detrep(f, cfg, c_detrep.seed);
      Json report;
      report["verdict"] = to_string(result.cert.verdict);
      if (result.rep) {
        double max_res = 0.0;
        const bool verified = verify_detrep(f, result.rep->L, detrep_sizes, detrep_samples,
                                            c_detrep.seed, cfg, &max_res);
        result.cert.scaling = result.rep->scaling;
        report["detrep"] = Json{{"L", io::pencil_to_json(result.rep->L)},
                                {"verification", Json{{"sizes", detrep_sizes},
                                                      {"samples", detrep_samples},
                                                      {"max_residual", max_res},
                                                      {"pass", verified}}}};
        if (!verified) {
          result.cert.verdict = Verdict::Indeterminate;
          result.cert.detail = "determinant verification failed";
          report["verdict"] = to_string(result.cert.verdict);
        }
      } else {
        report["detrep"] = nullptr;
      }
      report["certificate"] = io::certificate_to_json(result.cert, cfg);
      if (!c_detrep.out_path.empty()) io::write_json_file(c_detrep.out_path, report);
      if (c_detrep.json)
        std::cout << io::canonical_dump(report);
      else {
        print_human(result.cert);
        if (result.rep)
          std::cout << "determinantal representation of size " << result.rep->L.rows() << "\n";
        else
          std::cout << "no determinantal representation assembled\n";
      }
      return exit_code(result.cert.verdict);
    }

    if (cmd_witness->parsed()) {
      const ToleranceConfig cfg = c_witness.tolerances();
      const LinearPencil L = io::pencil_from_json(io::read_json_file(in_path));
      WitnessOptions opts;
      opts.mode = witness_mode == "polydisk" ? WitnessMode::Polydisk : WitnessMode::Upper;
      opts.budget = witness_budget;
      opts.size_cap = witness_cap;
      opts.seed = c_witness.seed;
      opts.parallel = !witness_serial;
      const auto w = find_witness(L, opts, cfg);
      Json report;
      report["mode"] = witness_mode;
      report["budget"] = witness_budget;
      report["seed"] = c_witness.seed;
      if (w) {
        report["witness"] = io::tuple_to_json(*w);
        report["min_singular_value"] = min_singular_value(eval_pencil(L, *w));
      } else {
        report["witness"] = nullptr;
      }
      if (!c_witness.out_path.empty()) io::write_json_file(c_witness.out_path, report);
      if (c_witness.json)
        std::cout << io::canonical_dump(report);
      else if (w)
        std::cout << "witness found at size " << w->size() << " (refutes stability)\n";
      else
        std::cout << "none found within budget (not a stability proof)\n";
      return w ? kExitUnstable : kExitStable;
    }

    if (cmd_certify->parsed()) {
      const ToleranceConfig cfg = c_certify.tolerances();
      const LinearPencil L = io::pencil_from_json(io::read_json_file(in_path));
      const StabilityCertificate cert = io::certificate_from_json(io::read_json_file(second_path));
      std::vector<std::string> reasons;
      std::vector<VerifyCheck> table;
      const bool ok = verify_certificate_for(L, cert, cfg, &reasons, &table);
      std::printf("%-55s %12s %12s  %s\n", "check", "residual", "bound", "status");
      for (const auto& row : table)
        std::printf("%-55s %12.3e %12.3e  %s\n", row.name.c_str(), row.residual, row.bound,
                    row.pass ? "ok" : "FAIL");
      std::cout << (ok ? "certificate verified\n" : "certificate REJECTED\n");
      for (const auto& r : reasons) std::cout << "  - " << r << "\n";
      return ok ? 0 : 1;
    }

    if (cmd_eval->parsed()) {
      const auto obj = io::object_from_json(io::read_json_file(in_path));
      const MatrixTuple X = io::tuple_from_json(io::read_json_file(second_path));
      const ComplexMatrix value =
          obj.is_pencil ? eval_pencil(obj.pencil, X) : eval_poly(obj.poly, X);
      Json report;
      report["value"] = io::matrix_to_json(value);
      report["min_singular_value"] = min_singular_value(value);
      if (!c_eval.out_path.empty()) io::write_json_file(c_eval.out_path, report);
      std::cout << io::canonical_dump(report);
      return 0;
    }

    if (cmd_gen->parsed()) {
      const ToleranceConfig cfg = c_gen.tolerances();
      Json out;
      if (!gen_ps.empty()) {
        const Eigen::Index delta = gen_ps.at(0);
        const int d = static_cast<int>(gen_ps.at(1));
        if (delta < 1 || d < 0) throw InputError("gen: bad --purely-stable parameters");
        Rng rng(mix_seed(c_gen.seed, 0x6e9));
        LinearPencil L(d, delta, delta);
        const ComplexMatrix H = random_hermitian(delta, rng);
        ComplexMatrix g = random_gaussian(delta, delta, rng);
        L.coeff(0) = H + Complex(0, 1) * (g * g.adjoint());
        for (int j = 1; j <= d; ++j) {
          g = random_gaussian(delta, delta, rng);
          L.coeff(j) = g * g.adjoint();
        }
        if (!is_purely_stable(L, cfg)) throw InputError("gen: sampled pencil degenerate; retry with another seed");
        out = io::pencil_to_json(L);
      } else {
        out = io::poly_to_json(gen_stable_poly(gen_alphas, gen_betas));
      }
      if (!c_gen.out_path.empty())
        io::write_json_file(c_gen.out_path, out);
      else
        std::cout << io::canonical_dump(out);
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const EvalError& e) {
    std::cerr << "evaluation error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
