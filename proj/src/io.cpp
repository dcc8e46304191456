#include "ncstable/io.hpp"

#include <fstream>
#include <set>

namespace ncstable::io {

namespace {

Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InputError("expected a complex scalar as [re, im]");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

[[noreturn]] void bad(const std::string& what) { throw InputError("malformed file: " + what); }

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) bad(std::string("missing field '") + name + "'");
  return j.at(name);
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array()) bad("matrix must be an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return ComplexMatrix(0, 0);
  if (!j[0].is_array()) bad("matrix rows must be arrays");
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[static_cast<size_t>(r)].is_array() ||
        static_cast<Eigen::Index>(j[static_cast<size_t>(r)].size()) != cols)
      bad("matrix rows have inconsistent lengths");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = complex_from_json(j[static_cast<size_t>(r)][static_cast<size_t>(c)]);
  }
  return m;
}

Json pencil_to_json(const LinearPencil& L) {
  Json j;
  j["vars"] = L.vars();
  j["rows"] = L.rows();
  j["cols"] = L.cols();
  Json coeffs = Json::array();
  for (const auto& a : L.coeffs()) coeffs.push_back(matrix_to_json(a));
  j["A"] = std::move(coeffs);
  return j;
}

LinearPencil pencil_from_json(const Json& j) {
  const int vars = field(j, "vars").get<int>();
  const Eigen::Index rows = field(j, "rows").get<Eigen::Index>();
  const Eigen::Index cols = field(j, "cols").get<Eigen::Index>();
  const Json& A = field(j, "A");
  if (!A.is_array() || static_cast<int>(A.size()) != vars + 1)
    bad("'A' must list vars+1 coefficients");
  std::vector<ComplexMatrix> coeffs;
  for (const auto& a : A) {
    ComplexMatrix m = matrix_from_json(a);
    if (m.rows() != rows || m.cols() != cols) bad("coefficient shape differs from declared dims");
    coeffs.push_back(std::move(m));
  }
  return LinearPencil::from_coeffs(std::move(coeffs));
}

Json poly_to_json(const NcPolynomial& f) {
  Json j;
  j["vars"] = f.vars();
  Json terms = Json::array();
  for (const auto& [w, c] : f.terms()) {
    Json term;
    term["word"] = w;
    term["coeff"] = complex_to_json(c);
    terms.push_back(std::move(term));
  }
  j["terms"] = std::move(terms);
  return j;
}

NcPolynomial poly_from_json(const Json& j) {
  const int vars = field(j, "vars").get<int>();
  NcPolynomial f(vars);
  const Json& terms = field(j, "terms");
  if (!terms.is_array()) bad("'terms' must be an array");
  std::set<Word, WordOrder> seen;
  for (const auto& t : terms) {
    const Json& wj = field(t, "word");
    if (!wj.is_array()) bad("term 'word' must be an array of indices");
    Word w;
    for (const auto& letter : wj) {
      if (!letter.is_number_integer()) bad("word letters must be integers");
      w.push_back(letter.get<int>());
    }
    if (!seen.insert(w).second) bad("duplicate word in polynomial file");
    f.add_term(w, complex_from_json(field(t, "coeff")));
  }
  return f;
}

Json tuple_to_json(const MatrixTuple& X) {
  Json j;
  j["n"] = X.size();
  Json xs = Json::array();
  for (const auto& x : X.X) xs.push_back(matrix_to_json(x));
  j["X"] = std::move(xs);
  return j;
}

MatrixTuple tuple_from_json(const Json& j) {
  const Json& xs = field(j, "X");
  if (!xs.is_array()) bad("'X' must be an array of matrices");
  std::vector<ComplexMatrix> mats;
  for (const auto& x : xs) mats.push_back(matrix_from_json(x));
  MatrixTuple X(std::move(mats));
  if (j.contains("n") && X.vars() > 0 && X.size() != field(j, "n").get<Eigen::Index>())
    bad("declared size 'n' does not match the matrices");
  return X;
}

Json roesser_to_json(const RoesserSpec& spec) {
  Json j;
  j["A"] = matrix_to_json(spec.A);
  j["dims"] = spec.dims;
  return j;
}

RoesserSpec roesser_from_json(const Json& j) {
  RoesserSpec spec;
  spec.A = matrix_from_json(field(j, "A"));
  for (const auto& v : field(j, "dims")) {
    if (!v.is_number_integer()) bad("'dims' must be integers");
    spec.dims.push_back(v.get<Eigen::Index>());
  }
  return spec;
}

Json certificate_to_json(const StabilityCertificate& cert, const ToleranceConfig& cfg) {
  Json j;
  j["verdict"] = to_string(cert.verdict);
  j["transposed"] = cert.transposed;
  Json stages = Json::array();
  for (const auto& st : cert.stages) {
    Json s;
    s["rows"] = st.stage_rows;
    s["cols"] = st.stage_cols;
    s["D"] = matrix_to_json(st.D);
    s["V"] = matrix_to_json(st.V);
    stages.push_back(std::move(s));
  }
  j["stages"] = std::move(stages);
  if (cert.triangular) {
    Json tri;
    tri["D"] = matrix_to_json(cert.triangular->D);
    tri["E"] = matrix_to_json(cert.triangular->E);
    Json blocks = Json::array();
    for (const auto& b : cert.triangular->blocks) {
      Json bj;
      bj["H"] = matrix_to_json(b.H);
      Json ps = Json::array();
      for (const auto& p : b.P) ps.push_back(matrix_to_json(p));
      bj["P"] = std::move(ps);
      blocks.push_back(std::move(bj));
    }
    tri["blocks"] = std::move(blocks);
    j["triangular"] = std::move(tri);
  }
  if (cert.witness) j["witness"] = tuple_to_json(*cert.witness);
  Json meta;
  meta["kind"] = cert.kind;
  meta["tolerances"] = Json{{"rank", cfg.rank_tol},
                            {"psd", cfg.psd_tol},
                            {"residual", cfg.residual_tol},
                            {"sdp", cfg.sdp_tol}};
  meta["seed"] = cert.seed;
  if (cert.infeasible_stage >= 0) meta["infeasible_stage"] = cert.infeasible_stage;
  if (cert.hermitian_sign != 0) meta["hermitian_sign"] = cert.hermitian_sign;
  if (!cert.detail.empty()) meta["detail"] = cert.detail;
  if (cert.shift_alpha) {
    Json alpha = Json::array();
    for (Eigen::Index i = 0; i < cert.shift_alpha->size(); ++i)
      alpha.push_back((*cert.shift_alpha)(i));
    meta["alpha"] = std::move(alpha);
    if (cert.shift_value) meta["shift_value"] = complex_to_json(*cert.shift_value);
  }
  if (cert.scaling) meta["scaling"] = *cert.scaling;
  j["meta"] = std::move(meta);
  return j;
}

StabilityCertificate certificate_from_json(const Json& j) {
  StabilityCertificate cert;
  const std::string verdict = field(j, "verdict").get<std::string>();
  if (verdict == "stable")
    cert.verdict = Verdict::Stable;
  else if (verdict == "unstable")
    cert.verdict = Verdict::Unstable;
  else if (verdict == "indeterminate")
    cert.verdict = Verdict::Indeterminate;
  else
    bad("unknown verdict '" + verdict + "'");
  cert.transposed = j.value("transposed", false);
  if (j.contains("stages")) {
    for (const auto& s : j.at("stages")) {
      StageRecord st;
      st.D = matrix_from_json(field(s, "D"));
      st.V = matrix_from_json(field(s, "V"));
      st.stage_rows = s.value("rows", st.D.cols());
      st.stage_cols = s.value("cols", st.D.rows());
      if (st.V.rows() == 0) st.V = ComplexMatrix(st.D.rows(), 0);
      cert.stages.push_back(std::move(st));
    }
  }
  if (j.contains("triangular") && !j.at("triangular").is_null()) {
    const Json& tri = j.at("triangular");
    StabilityCertificate::Triangular t;
    t.D = matrix_from_json(field(tri, "D"));
    t.E = matrix_from_json(field(tri, "E"));
    for (const auto& bj : field(tri, "blocks")) {
      PurelyStableData b;
      b.H = matrix_from_json(field(bj, "H"));
      for (const auto& pj : field(bj, "P")) b.P.push_back(matrix_from_json(pj));
      if (b.P.empty()) bad("triangular block without P matrices");
      t.blocks.push_back(std::move(b));
    }
    cert.triangular = std::move(t);
  }
  if (j.contains("witness") && !j.at("witness").is_null())
    cert.witness = tuple_from_json(j.at("witness"));
  if (j.contains("meta")) {
    const Json& meta = j.at("meta");
    cert.kind = meta.value("kind", std::string("stable"));
    cert.seed = meta.value("seed", std::uint64_t{0});
    cert.infeasible_stage = meta.value("infeasible_stage", -1);
    cert.hermitian_sign = meta.value("hermitian_sign", 0);
    cert.detail = meta.value("detail", std::string());
    if (meta.contains("alpha")) {
      const Json& aj = meta.at("alpha");
      Eigen::VectorXd alpha(static_cast<Eigen::Index>(aj.size()));
      for (Eigen::Index i = 0; i < alpha.size(); ++i) alpha(i) = aj[static_cast<size_t>(i)].get<double>();
      cert.shift_alpha = std::move(alpha);
      if (meta.contains("shift_value"))
        cert.shift_value = complex_from_json(meta.at("shift_value"));
    }
    if (meta.contains("scaling")) cert.scaling = meta.at("scaling").get<double>();
  }
  return cert;
}

PencilOrPoly object_from_json(const Json& j) {
  PencilOrPoly out;
  if (j.contains("A") && j.contains("rows")) {
    out.is_pencil = true;
    out.pencil = pencil_from_json(j);
  } else if (j.contains("terms")) {
    out.is_pencil = false;
    out.poly = poly_from_json(j);
  } else {
    bad("expected a pencil file ('A') or a polynomial file ('terms')");
  }
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("invalid JSON in '" + path + "': " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << canonical_dump(j);
}

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace ncstable::io
