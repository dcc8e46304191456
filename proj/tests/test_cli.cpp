#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ncstable/io.hpp"
#include "ncstable/realization.hpp"

using namespace ncstable;
namespace fs = std::filesystem;

namespace {

const std::string cli = NCSTABLE_CLI_PATH;

struct RunResult {
  int code = -1;
  std::string out;
};

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "ncstable_cli_test";
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

RunResult run(const std::string& args) {
  const fs::path log = work_dir() / "out.txt";
  const std::string cmd = cli + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult res;
  res.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  res.out = ss.str();
  return res;
}

std::string write(const std::string& name, const io::Json& j) {
  const fs::path p = work_dir() / name;
  io::write_json_file(p.string(), j);
  return p.string();
}

std::string write_raw(const std::string& name, const std::string& text) {
  const fs::path p = work_dir() / name;
  std::ofstream out(p);
  out << text;
  return p.string();
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

}  // namespace

TEST_CASE("file round trips are byte stable") {
  const std::string pencil_path = write("roundtrip_pencil.json", io::pencil_to_json(paper_example()));
  std::ifstream f1(pencil_path);
  std::stringstream buf1;
  buf1 << f1.rdbuf();
  const LinearPencil parsed = io::pencil_from_json(io::read_json_file(pencil_path));
  CHECK(io::canonical_dump(io::pencil_to_json(parsed)) == buf1.str());

  NcPolynomial f(2);
  f.add_term({2, 1}, Complex(0.25, -1.0 / 3.0));
  f.add_term({}, 1.0);
  f.add_term({1}, 1e-17);  // dropped on construction
  const std::string poly_path = write("roundtrip_poly.json", io::poly_to_json(f));
  const NcPolynomial g = io::poly_from_json(io::read_json_file(poly_path));
  CHECK(f == g);
  CHECK(io::canonical_dump(io::poly_to_json(g)) ==
        io::canonical_dump(io::poly_to_json(f)));

  // duplicate words rejected
  const std::string dup = write_raw("dup.json",
                                    R"({"vars":1,"terms":[{"word":[1],"coeff":[1,0]},{"word":[1],"coeff":[2,0]}]})");
  CHECK_THROWS_AS(io::poly_from_json(io::read_json_file(dup)), InputError);
}

TEST_CASE("check command exit codes and certificates") {
  const std::string paper = write("paper.json", io::pencil_to_json(paper_example()));
  const fs::path cert = work_dir() / "paper_cert.json";
  CHECK(run("check " + paper + " --out " + cert.string()).code == 0);
  CHECK(run("certify " + paper + " " + cert.string()).code == 0);

  const std::string xm = write("xm.json",
                               io::pencil_to_json(scalar_pencil(Complex(0, -1), 1.0)));
  CHECK(run("check " + xm).code == 1);

  const std::string trunc = write_raw("trunc.json", R"({"vars":1,"rows":1,)");
  CHECK(run("check " + trunc).code == 3);

  // tampered certificate is rejected
  io::Json tampered = io::read_json_file(cert.string());
  tampered["triangular"]["blocks"][0]["P"][1][0][0][0] =
      -tampered["triangular"]["blocks"][0]["P"][1][0][0][0].get<double>() - 1.0;
  const std::string bad = write("paper_cert_bad.json", tampered);
  CHECK(run("certify " + paper + " " + bad).code != 0);

  // certificate against a different pencil is rejected
  const std::string other = write("other.json",
                                  io::pencil_to_json(scalar_pencil(Complex(0, 1), 1.0)));
  CHECK(run("certify " + other + " " + cert.string()).code != 0);

  // certificate emission is byte stable across a parse round trip
  std::ifstream c1(cert.string());
  std::stringstream raw;
  raw << c1.rdbuf();
  ToleranceConfig cfg;
  const StabilityCertificate parsed = io::certificate_from_json(io::read_json_file(cert.string()));
  CHECK(io::canonical_dump(io::certificate_to_json(parsed, cfg)) == raw.str());
}

TEST_CASE("hurwitz, schur and roesser commands") {
  const std::string hur = write("hur.json", io::pencil_to_json(scalar_pencil(1.0, 1.0)));
  const fs::path hcert = work_dir() / "hur_cert.json";
  CHECK(run("hurwitz " + hur + " --out " + hcert.string()).code == 0);
  CHECK(run("certify " + hur + " " + hcert.string()).code == 0);

  const std::string schur_bad = write("schur_bad.json",
                                      io::pencil_to_json(scalar_pencil(1.0, -2.0)));
  const fs::path scert = work_dir() / "schur_cert.json";
  const RunResult r = run("schur " + schur_bad + " --out " + scert.string());
  CHECK(r.code == 1);
  const StabilityCertificate cert = io::certificate_from_json(io::read_json_file(scert.string()));
  REQUIRE(cert.witness.has_value());
  CHECK(std::abs(cert.witness->X[0](0, 0) - Complex(0.5)) < 1e-3);
  CHECK(run("certify " + schur_bad + " " + scert.string()).code == 0);

  const std::string roe = write("roe.json",
                                io::roesser_to_json(RoesserSpec{ComplexMatrix::Zero(2, 2), {1, 1}}));
  CHECK(run("roesser " + roe).code == 0);

  ComplexMatrix A = ComplexMatrix::Zero(2, 2);
  A(0, 0) = 2.0;
  const std::string roe_bad = write("roe_bad.json", io::roesser_to_json(RoesserSpec{A, {1, 1}}));
  CHECK(run("roesser " + roe_bad).code == 1);
}

TEST_CASE("witness command") {
  const std::string xm = write("w_xm.json",
                               io::pencil_to_json(scalar_pencil(Complex(0, -1), 1.0)));
  const RunResult found = run("witness " + xm + " --json");
  CHECK(found.code == 1);
  CHECK(found.out.find("witness") != std::string::npos);

  const std::string xp = write("w_xp.json",
                               io::pencil_to_json(scalar_pencil(Complex(0, 1), 1.0)));
  CHECK(run("witness " + xp).code == 0);
  CHECK(run("witness " + xm + " --budget 0").code == 0);
  // serial flag gives the same answer
  CHECK(run("witness " + xm + " --serial").code == 1);
}

TEST_CASE("detrep command") {
  NcPolynomial f(2);
  f.add_term({}, 1.0);
  f.add_term({1, 2}, -1.0);
  const std::string fp = write("d_poly.json", io::poly_to_json(f));
  const fs::path rep = work_dir() / "d_rep.json";
  const RunResult r = run("detrep " + fp + " --json --out " + rep.string());
  CHECK(r.code == 0);
  const io::Json report = io::read_json_file(rep.string());
  REQUIRE(report.contains("detrep"));
  REQUIRE(!report["detrep"].is_null());
  CHECK(report["detrep"]["verification"]["pass"].get<bool>());

  NcPolynomial affine(1);
  affine.add_term({}, 1.0);
  affine.add_term({1}, 1.0);
  CHECK(run("detrep " + write("d_affine.json", io::poly_to_json(affine))).code == 0);

  NcPolynomial xm(1);
  xm.add_term({}, Complex(0, -1));
  xm.add_term({1}, 1.0);
  CHECK(run("detrep " + write("d_xm.json", io::poly_to_json(xm))).code == 1);
}

TEST_CASE("eval command") {
  const std::string pencil = write("e_pencil.json", io::pencil_to_json(paper_example()));
  MatrixTuple X = MatrixTuple::scalars({3.0});
  const std::string tuple = write("e_tuple.json", io::tuple_to_json(X));
  const RunResult r = run("eval " + pencil + " " + tuple);
  CHECK(r.code == 0);
  CHECK(r.out.find("min_singular_value") != std::string::npos);

  CHECK(run("eval " + pencil + " " + pencil).code == 3);
}

TEST_CASE("gen command") {
  const fs::path poly = work_dir() / "g_poly.json";
  CHECK(run("gen --alphas -1 --betas 0 --out " + poly.string()).code == 0);
  const NcPolynomial f = io::poly_from_json(io::read_json_file(poly.string()));
  CHECK(f == gen_stable_poly({-1.0}, {0.0}));

  const fs::path ps = work_dir() / "g_ps.json";
  CHECK(run("gen --purely-stable 3 2 --seed 5 --out " + ps.string()).code == 0);
  const LinearPencil L = io::pencil_from_json(io::read_json_file(ps.string()));
  ToleranceConfig cfg;
  CHECK(is_purely_stable(L, cfg).has_value());

  CHECK(run("gen --alphas 1 --betas 0 --out " + poly.string()).code == 3);
}

TEST_CASE("tolerance flags override the environment") {
  const std::string xp = write("t_xp.json",
                               io::pencil_to_json(scalar_pencil(Complex(0, 1), 1.0)));
  // nonsensically loose rank tolerance through the environment still yields a
  // stable verdict when the flag overrides it
  const RunResult r = run("check " + xp + " --tol-rank 1e-9");
  CHECK(r.code == 0);
}
