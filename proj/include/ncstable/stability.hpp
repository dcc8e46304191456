#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncstable/core.hpp"
#include "ncstable/numerics.hpp"
#include "ncstable/sdp.hpp"

namespace ncstable {

enum class Verdict { Stable, Unstable, Indeterminate };

const char* to_string(Verdict v);

/// Data of a pencil H + iP_0 + sum_j P_j x_j with H hermitian, P_j PSD and
/// trivial joint kernel.
struct PurelyStableData {
  ComplexMatrix H;
  std::vector<ComplexMatrix> P;  // P_0 .. P_d

  LinearPencil to_pencil() const;
};

/// One stage of the recursive decision procedure. D is the feasibility-SDP
/// solution for the stage pencil (uncompressed row frame); the columns of V
/// span the joint kernel of the products D A_j.
struct StageRecord {
  ComplexMatrix D;
  ComplexMatrix V;
  Eigen::Index stage_rows = 0, stage_cols = 0;
};

struct StabilityCertificate {
  Verdict verdict = Verdict::Indeterminate;
  bool transposed = false;
  std::vector<StageRecord> stages;
  std::optional<PurelyStableData> final_block;  // purely stable D*L of the last stage

  struct Triangular {
    ComplexMatrix D, E;  // D L E block lower triangular
    std::vector<PurelyStableData> blocks;
  };
  std::optional<Triangular> triangular;

  std::optional<MatrixTuple> witness;

  // Provenance of the decided question and of reductions applied to reach the
  // plain stable-pencil engine.
  std::string kind = "stable";  // stable | hurwitz | schur | roesser
  int infeasible_stage = -1;    // stage whose SDP was infeasible (Unstable)
  std::string detail;           // human-readable note (row deficiency, relaxation, ...)
  int hermitian_sign = 0;       // +-1 when produced by the hermitian fast path
  std::uint64_t seed = 0;
  std::optional<Eigen::VectorXd> shift_alpha;  // polynomial pipeline shift
  std::optional<Complex> shift_value;          // f(alpha)
  std::optional<double> scaling;               // determinantal rescaling c
};

/// (H = re A_0, P_0 = im A_0, P_j = A_j) when that data is purely stable.
std::optional<PurelyStableData> is_purely_stable(const LinearPencil& L,
                                                 const ToleranceConfig& cfg);

/// Recursive decision procedure: orient, compress rows, solve the feasibility
/// SDP, cut by the joint kernel, repeat. Never throws on well-formed input.
StabilityCertificate check_stable(const LinearPencil& L, const ToleranceConfig& cfg);

/// Assembles (D_total, E_total, blocks) with D_total L E_total block lower
/// triangular and purely stable diagonal blocks, from the stage records.
StabilityCertificate::Triangular assemble_triangular(const LinearPencil& L,
                                                     const StabilityCertificate& cert);

struct VerifyCheck {
  std::string name;
  double residual = 0.0;
  double bound = 0.0;
  bool pass = true;
};

/// Independent recheck of a certificate against the pencil with fresh
/// numerics. Collects failure reasons (and optionally a residual table).
bool verify_certificate(const LinearPencil& L, const StabilityCertificate& cert,
                        const ToleranceConfig& cfg,
                        std::vector<std::string>* reasons = nullptr,
                        std::vector<VerifyCheck>* table = nullptr);

/// True iff A_1 A_0^{-1}, ..., A_d A_0^{-1} generate the full matrix algebra.
bool is_irreducible(const LinearPencil& L, const ToleranceConfig& cfg);

/// Fast path for hermitian irreducible pencils: stable iff L or -L is purely
/// stable; no SDP solve.
StabilityCertificate check_hermitian_stable(const LinearPencil& L,
                                            const ToleranceConfig& cfg);

enum class WitnessMode { Upper, Polydisk };

struct WitnessOptions {
  WitnessMode mode = WitnessMode::Upper;
  long budget = 20000;  // objective evaluations
  int size_cap = 0;     // 0: theory bound for the mode
  std::uint64_t seed = 0;
  bool parallel = true;  // OpenMP across restarts; false gives the serial reference
};

/// Multi-start sampling plus coordinatewise descent on min_singular_value of
/// L(X) over the open search region. A returned tuple refutes stability;
/// nullopt is not a stability proof. Deterministic per seed, independent of
/// the parallel flag.
std::optional<MatrixTuple> find_witness(const LinearPencil& L, const WitnessOptions& opts,
                                        const ToleranceConfig& cfg);
std::optional<MatrixTuple> find_witness(const LinearPencil& L, WitnessMode mode, long budget,
                                        std::uint64_t seed, const ToleranceConfig& cfg);

}  // namespace ncstable
