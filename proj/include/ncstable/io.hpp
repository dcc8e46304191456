#pragma once

#include <json.hpp>
#include <string>

#include "ncstable/core.hpp"
#include "ncstable/numerics.hpp"
#include "ncstable/stability.hpp"
#include "ncstable/transforms.hpp"

namespace ncstable::io {

using Json = nlohmann::ordered_json;

// Complex scalars are emitted as [re, im]; matrices as row-major nested
// arrays. Emission is canonical: fixed field order and polynomial terms in
// graded-lexicographic word order, so parse-emit round trips are byte stable.

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

Json pencil_to_json(const LinearPencil& L);
LinearPencil pencil_from_json(const Json& j);

Json poly_to_json(const NcPolynomial& f);
NcPolynomial poly_from_json(const Json& j);

Json tuple_to_json(const MatrixTuple& X);
MatrixTuple tuple_from_json(const Json& j);

Json roesser_to_json(const RoesserSpec& spec);
RoesserSpec roesser_from_json(const Json& j);

Json certificate_to_json(const StabilityCertificate& cert, const ToleranceConfig& cfg);
StabilityCertificate certificate_from_json(const Json& j);

/// Parses a file that may hold a pencil or a polynomial.
struct PencilOrPoly {
  bool is_pencil = false;
  LinearPencil pencil;
  NcPolynomial poly;
};
PencilOrPoly object_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);
std::string canonical_dump(const Json& j);

}  // namespace ncstable::io
