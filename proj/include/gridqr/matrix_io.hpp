#pragma once

#include <string>

#include "gridqr/dense_matrix.hpp"

namespace gridqr {

/// Binary matrix format, bit-exact:
///   magic "GQR1" | u64 rows | u64 cols | row-major f64 payload
/// all little-endian. write/read round-trips are bitwise lossless.
void write_gqr1(const std::string& path, const DenseMatrix& a);
DenseMatrix read_gqr1(const std::string& path);

/// CSV alternative: one row per line, values with max_digits10 precision so
/// doubles round-trip exactly.
void write_csv(const std::string& path, const DenseMatrix& a);
DenseMatrix read_csv(const std::string& path);

/// Dispatches on the ".csv" extension, otherwise GQR1.
void write_matrix(const std::string& path, const DenseMatrix& a);
DenseMatrix read_matrix(const std::string& path);

}  // namespace gridqr
