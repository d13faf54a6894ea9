#pragma once

#include <algorithm>
#include <cstring>
#include <fstream>
#include <string>
#include <tuple>
#include <vector>

#include "flexvector/types.hpp"

namespace fv {

// Compressed sparse row matrix with 32-bit integer values.  Column indices are
// sorted and unique within every row; row_ptr is monotone with
// row_ptr[0] == 0 and row_ptr[n_rows] == nnz.
struct CsrMatrix {
  i32 n_rows = 0;
  i32 n_cols = 0;
  std::vector<i64> row_ptr;  // size n_rows + 1
  std::vector<i32> col_idx;  // size nnz
  std::vector<i32> values;   // size nnz

  i64 nnz() const { return static_cast<i64>(col_idx.size()); }
  i64 row_nnz(i32 r) const { return row_ptr[r + 1] - row_ptr[r]; }
};

// Dense row-major integer matrix.
struct DenseMatrix {
  i32 n_rows = 0;
  i32 n_cols = 0;
  std::vector<i32> data;  // size n_rows * n_cols

  i32& at(i32 r, i32 c) { return data[static_cast<i64>(r) * n_cols + c]; }
  i32 at(i32 r, i32 c) const { return data[static_cast<i64>(r) * n_cols + c]; }
};

inline DenseMatrix make_dense(i32 rows, i32 cols, i32 fill = 0) {
  DenseMatrix m;
  m.n_rows = rows;
  m.n_cols = cols;
  m.data.assign(static_cast<i64>(rows) * cols, fill);
  return m;
}

// Throws ShapeError when the structural invariants do not hold.
inline void validate(const CsrMatrix& a) {
  if (a.n_rows < 0 || a.n_cols < 0) throw ShapeError("csr: negative dimension");
  if (static_cast<i64>(a.row_ptr.size()) != a.n_rows + 1)
    throw ShapeError("csr: row_ptr size mismatch");
  if (!a.row_ptr.empty() && a.row_ptr.front() != 0)
    throw ShapeError("csr: row_ptr[0] != 0");
  if (a.row_ptr.back() != a.nnz()) throw ShapeError("csr: row_ptr tail != nnz");
  if (a.values.size() != a.col_idx.size())
    throw ShapeError("csr: values/col_idx size mismatch");
  for (i32 r = 0; r < a.n_rows; ++r) {
    if (a.row_ptr[r] > a.row_ptr[r + 1]) throw ShapeError("csr: row_ptr not monotone");
    for (i64 p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
      if (a.col_idx[p] < 0 || a.col_idx[p] >= a.n_cols)
        throw ShapeError("csr: column out of range");
      if (p > a.row_ptr[r] && a.col_idx[p - 1] >= a.col_idx[p])
        throw ShapeError("csr: columns not sorted/unique in row " + std::to_string(r));
    }
  }
}

// Builds a CSR matrix from (row, col, value) triplets.  Duplicate coordinates
// are merged by keeping the last value; zero values are kept as explicit
// entries only when keep_zeros is set.
inline CsrMatrix csr_from_triplets(i32 n_rows, i32 n_cols,
                                   std::vector<std::tuple<i32, i32, i32>> trip,
                                   bool keep_zeros = true) {
  for (const auto& [r, c, v] : trip) {
    (void)v;
    if (r < 0 || r >= n_rows || c < 0 || c >= n_cols)
      throw ShapeError("triplet out of range (" + std::to_string(r) + "," +
                       std::to_string(c) + ")");
  }
  std::stable_sort(trip.begin(), trip.end(), [](const auto& x, const auto& y) {
    return std::tie(std::get<0>(x), std::get<1>(x)) <
           std::tie(std::get<0>(y), std::get<1>(y));
  });
  CsrMatrix a;
  a.n_rows = n_rows;
  a.n_cols = n_cols;
  a.row_ptr.assign(n_rows + 1, 0);
  std::vector<std::tuple<i32, i32, i32>> dedup;
  dedup.reserve(trip.size());
  for (const auto& t : trip) {
    if (!dedup.empty() && std::get<0>(dedup.back()) == std::get<0>(t) &&
        std::get<1>(dedup.back()) == std::get<1>(t)) {
      dedup.back() = t;  // last write wins
    } else {
      dedup.push_back(t);
    }
  }
  for (const auto& [r, c, v] : dedup) {
    if (v == 0 && !keep_zeros) continue;
    (void)c;
    a.row_ptr[r + 1]++;
  }
  for (i32 r = 0; r < n_rows; ++r) a.row_ptr[r + 1] += a.row_ptr[r];
  a.col_idx.reserve(dedup.size());
  a.values.reserve(dedup.size());
  for (const auto& [r, c, v] : dedup) {
    if (v == 0 && !keep_zeros) continue;
    (void)r;
    a.col_idx.push_back(c);
    a.values.push_back(v);
  }
  validate(a);
  return a;
}

inline DenseMatrix densify(const CsrMatrix& a) {
  DenseMatrix m = make_dense(a.n_rows, a.n_cols);
  for (i32 r = 0; r < a.n_rows; ++r)
    for (i64 p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p)
      m.at(r, a.col_idx[p]) = a.values[p];
  return m;
}

// ---------------------------------------------------------------------------
// Versioned little-endian binary container for CSR matrices.
//
//   bytes 0..3   magic "FVCS"
//   bytes 4..7   format version (u32, currently 1)
//   then         n_rows (i32), n_cols (i32), nnz (i64),
//                row_ptr[n_rows+1] (i64), col_idx[nnz] (i32), values[nnz] (i32)
// ---------------------------------------------------------------------------

namespace detail {

inline bool host_is_little_endian() {
  const u32 probe = 1;
  unsigned char b[4];
  std::memcpy(b, &probe, 4);
  return b[0] == 1;
}

template <typename T>
void write_pod(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if (!host_is_little_endian()) std::reverse(buf, buf + sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is, const char* what) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T)))
    throw ParseError(std::string("binary read truncated at ") + what);
  if (!host_is_little_endian()) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace detail

inline void save_csr(std::ostream& os, const CsrMatrix& a) {
  os.write("FVCS", 4);
  detail::write_pod<u32>(os, 1);
  detail::write_pod<i32>(os, a.n_rows);
  detail::write_pod<i32>(os, a.n_cols);
  detail::write_pod<i64>(os, a.nnz());
  for (i64 v : a.row_ptr) detail::write_pod<i64>(os, v);
  for (i32 v : a.col_idx) detail::write_pod<i32>(os, v);
  for (i32 v : a.values) detail::write_pod<i32>(os, v);
}

inline CsrMatrix load_csr(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "FVCS", 4) != 0)
    throw ParseError("csr binary: bad magic");
  const u32 version = detail::read_pod<u32>(is, "version");
  if (version != 1)
    throw ParseError("csr binary: unsupported version " + std::to_string(version));
  CsrMatrix a;
  a.n_rows = detail::read_pod<i32>(is, "n_rows");
  a.n_cols = detail::read_pod<i32>(is, "n_cols");
  const i64 nnz = detail::read_pod<i64>(is, "nnz");
  if (a.n_rows < 0 || a.n_cols < 0 || nnz < 0) throw ParseError("csr binary: negative size");
  a.row_ptr.resize(a.n_rows + 1);
  for (i64& v : a.row_ptr) v = detail::read_pod<i64>(is, "row_ptr");
  a.col_idx.resize(nnz);
  for (i32& v : a.col_idx) v = detail::read_pod<i32>(is, "col_idx");
  a.values.resize(nnz);
  for (i32& v : a.values) v = detail::read_pod<i32>(is, "values");
  validate(a);
  return a;
}

inline void save_csr_file(const std::string& path, const CsrMatrix& a) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for write: " + path);
  save_csr(os, a);
  if (!os) throw IoError("write failed: " + path);
}

inline CsrMatrix load_csr_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  return load_csr(is);
}

}  // namespace fv
