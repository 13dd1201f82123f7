#pragma once

#include "geostream/common.hpp"

#include <json.hpp>

#include <string>

namespace geostream {

using json = nlohmann::ordered_json;

enum class MatrixFormat { Text, Binary };

// Text: one row per line, whitespace-separated decimals.
// Binary: magic "GSTRM1", u64 LE n, u64 LE d, then n*d f64 LE row-major.
void write_matrix(const std::string& path, const Matrix& A, MatrixFormat fmt);
Matrix read_matrix(const std::string& path);  // sniffs the format by magic

json matrix_to_json(const Matrix& A);
Matrix matrix_from_json(const json& j);
json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j);

}  // namespace geostream
