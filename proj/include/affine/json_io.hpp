#pragma once

#include <string>

#include <json.hpp>

#include "affine/mc_compare.hpp"
#include "affine/params.hpp"
#include "affine/riccati.hpp"
#include "affine/simulate.hpp"

namespace affine {

// Canonical field order everywhere; serialized numbers use the shortest
// representation that parses back to the same double, so emitted files
// round-trip bit-compatibly.
using Json = nlohmann::ordered_json;

Json to_json(const SymMat& x);
SymMat symmat_from_json(const Json& j);

Json to_json(const ScalarAtomMeasure& m);
ScalarAtomMeasure scalar_measure_from_json(const Json& j);

Json to_json(const MatrixAtomMeasure& mu);
MatrixAtomMeasure matrix_measure_from_json(const Json& j);

Json to_json(const AffineParams& p);
AffineParams params_from_json(const Json& j);

Json to_json(const ValidationReport& r);
Json to_json(const CompareReport& r);
Json to_json(const AuditReport& r);

// Parse failures surface as std::invalid_argument with a field path.
Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

AffineParams load_params_file(const std::string& path);
SymMat load_symmat_file(const std::string& path);

// FNV-1a 64-bit content digest, hex-encoded.
std::string file_digest(const std::string& path);

}  // namespace affine
