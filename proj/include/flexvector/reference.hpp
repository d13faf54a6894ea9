#pragma once

#include <cmath>
#include <tuple>
#include <vector>

#include "flexvector/csr.hpp"
#include "flexvector/types.hpp"

namespace fv {

// Row-by-row sparse x dense product.  This is the ground-truth result every
// machine-level execution path is checked against; it shares only the
// wraparound arithmetic definition with the simulators, nothing else.
inline DenseMatrix spmm_reference(const CsrMatrix& s, const DenseMatrix& d) {
  if (s.n_cols != d.n_rows)
    throw ShapeError("spmm: inner dimensions differ (" + std::to_string(s.n_cols) +
                     " vs " + std::to_string(d.n_rows) + ")");
  DenseMatrix out = make_dense(s.n_rows, d.n_cols);
  for (i32 r = 0; r < s.n_rows; ++r) {
    for (i64 p = s.row_ptr[r]; p < s.row_ptr[r + 1]; ++p) {
      const i32 c = s.col_idx[p];
      const i32 v = s.values[p];
      i32* outp = &out.data[static_cast<i64>(r) * out.n_cols];
      const i32* dp = &d.data[static_cast<i64>(c) * d.n_cols];
      for (i32 j = 0; j < d.n_cols; ++j) outp[j] = wrap_mul_add(outp[j], v, dp[j]);
    }
  }
  return out;
}

// Symmetrically scaled adjacency with self-loops, quantized to integers:
// entry (i,j) of the result is round(2^frac_bits / sqrt(deg_i * deg_j)) where
// deg_i counts row i's stored neighbors plus the added self-loop.  Input
// values are treated as structure only.
inline CsrMatrix normalize_adjacency(const CsrMatrix& a, i32 frac_bits = 8) {
  if (a.n_rows != a.n_cols) throw ShapeError("normalize: matrix must be square");
  if (frac_bits < 0 || frac_bits > 20) throw ParamError("normalize: frac_bits out of range");
  const double scale = static_cast<double>(i64{1} << frac_bits);
  std::vector<double> deg(a.n_rows);
  for (i32 r = 0; r < a.n_rows; ++r) deg[r] = static_cast<double>(a.row_nnz(r) + 1);
  std::vector<std::tuple<i32, i32, i32>> trip;
  trip.reserve(static_cast<size_t>(a.nnz()) + a.n_rows);
  for (i32 r = 0; r < a.n_rows; ++r) {
    bool has_diag = false;
    for (i64 p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
      const i32 c = a.col_idx[p];
      if (c == r) has_diag = true;
      trip.emplace_back(r, c, static_cast<i32>(std::llround(scale / std::sqrt(deg[r] * deg[c]))));
    }
    if (!has_diag)
      trip.emplace_back(r, r, static_cast<i32>(std::llround(scale / deg[r])));
  }
  return csr_from_triplets(a.n_rows, a.n_cols, std::move(trip));
}

// One graph-convolution layer evaluated as a_hat x (x_feat x w).  The
// activation is an optional elementwise max(0, v); everything else is the
// exact integer pipeline the simulators run.
inline DenseMatrix gcn_layer_reference(const CsrMatrix& a_hat, const CsrMatrix& x_feat,
                                       const DenseMatrix& w, bool relu = false) {
  if (a_hat.n_rows != a_hat.n_cols) throw ShapeError("gcn: a_hat must be square");
  if (a_hat.n_cols != x_feat.n_rows)
    throw ShapeError("gcn: a_hat columns must match x rows");
  DenseMatrix t = spmm_reference(x_feat, w);
  DenseMatrix out = spmm_reference(a_hat, t);
  if (relu)
    for (i32& v : out.data) v = v < 0 ? 0 : v;
  return out;
}

}  // namespace fv
