#include "gridqr/matrix_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gridqr {

static_assert(std::endian::native == std::endian::little,
              "matrix_io assumes a little-endian host");

namespace {
constexpr char kMagic[4] = {'G', 'Q', 'R', '1'};
}

void write_gqr1(const std::string& path, const DenseMatrix& a) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_gqr1: cannot open " + path);
  f.write(kMagic, 4);
  uint64_t dims[2] = {static_cast<uint64_t>(a.rows), static_cast<uint64_t>(a.cols)};
  f.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  f.write(reinterpret_cast<const char*>(a.data.data()),
          static_cast<std::streamsize>(a.data.size() * sizeof(double)));
  if (!f) throw std::runtime_error("write_gqr1: write failed for " + path);
}

DenseMatrix read_gqr1(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_gqr1: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("read_gqr1: bad magic in " + path);
  uint64_t dims[2];
  f.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!f) throw std::runtime_error("read_gqr1: truncated header in " + path);
  if (dims[0] > (1u << 24) || dims[1] > (1u << 24))
    throw std::runtime_error("read_gqr1: implausible dimensions in " + path);
  DenseMatrix a(static_cast<int>(dims[0]), static_cast<int>(dims[1]));
  f.read(reinterpret_cast<char*>(a.data.data()),
         static_cast<std::streamsize>(a.data.size() * sizeof(double)));
  if (!f) throw std::runtime_error("read_gqr1: truncated payload in " + path);
  return a;
}

void write_csv(const std::string& path, const DenseMatrix& a) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_csv: cannot open " + path);
  f.precision(std::numeric_limits<double>::max_digits10);
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) {
      if (j) f << ',';
      f << a.at(i, j);
    }
    f << '\n';
  }
  if (!f) throw std::runtime_error("write_csv: write failed for " + path);
}

DenseMatrix read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      // strtod rather than stod: subnormal values must round-trip, not throw
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str())
        throw std::runtime_error("read_csv: bad cell '" + cell + "' in " + path);
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("read_csv: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("read_csv: empty file " + path);
  DenseMatrix a(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) a.at(i, j) = rows[i][j];
  return a;
}

namespace {
bool has_csv_ext(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}
}  // namespace

void write_matrix(const std::string& path, const DenseMatrix& a) {
  if (has_csv_ext(path)) write_csv(path, a);
  else write_gqr1(path, a);
}

DenseMatrix read_matrix(const std::string& path) {
  if (has_csv_ext(path)) return read_csv(path);
  return read_gqr1(path);
}

}  // namespace gridqr
