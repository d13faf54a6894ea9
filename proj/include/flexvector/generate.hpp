#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "flexvector/csr.hpp"
#include "flexvector/types.hpp"

namespace fv {

// Synthetic scale-free graph: degrees are drawn from a truncated discrete
// power law (P(d) ~ d^-alpha, 1 <= d < n), stubs are paired at random, and the
// paired edges are symmetrized and deduplicated.  Pairing losses are topped up
// with degree-weighted random edges until edges_target undirected edges exist,
// so the heavy tail survives: a few super-node columns end up carrying a large
// share of the nonzeros.  Fully deterministic for a given (n, target, alpha,
// seed).  All edge values are 1; no self-loops.
inline CsrMatrix gen_power_law(i32 n, i64 edges_target, double alpha, u64 seed) {
  if (n < 2) throw ParamError("gen_power_law: need at least 2 nodes");
  if (alpha <= 1.0) throw ParamError("gen_power_law: alpha must exceed 1");
  const i64 max_edges = static_cast<i64>(n) * (n - 1) / 2;
  if (edges_target < 1 || edges_target > max_edges)
    throw ParamError("gen_power_law: edges_target infeasible for n=" + std::to_string(n));

  Rng rng(seed);

  // Inverse-CDF table over degrees 1..n-1.
  const i32 dmax = n - 1;
  std::vector<double> cdf(dmax);
  double total = 0.0;
  for (i32 d = 1; d <= dmax; ++d) {
    total += std::pow(static_cast<double>(d), -alpha);
    cdf[d - 1] = total;
  }
  auto sample_degree = [&]() -> i32 {
    const double u = rng.next_real() * total;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    return static_cast<i32>(it - cdf.begin()) + 1;
  };

  std::vector<i32> degree(n);
  for (i32 i = 0; i < n; ++i) degree[i] = sample_degree();

  // Scale the stub count toward 2 * edges_target.
  i64 stub_sum = 0;
  for (i32 d : degree) stub_sum += d;
  const i64 want_stubs = 2 * edges_target;
  while (stub_sum < want_stubs) {
    const i32 i = static_cast<i32>(rng.next_below(static_cast<u64>(n)));
    if (degree[i] < dmax) {
      ++degree[i];
      ++stub_sum;
    }
  }
  while (stub_sum > want_stubs) {
    // Degrees may drop to zero: when fewer than n/2 edges are requested some
    // nodes must end up isolated, and a floor of 1 could never converge.
    const i32 i = static_cast<i32>(rng.next_below(static_cast<u64>(n)));
    if (degree[i] > 0) {
      --degree[i];
      --stub_sum;
    }
  }

  std::vector<i32> stubs;
  stubs.reserve(static_cast<size_t>(stub_sum));
  for (i32 i = 0; i < n; ++i) stubs.insert(stubs.end(), degree[i], i);
  for (i64 i = static_cast<i64>(stubs.size()) - 1; i > 0; --i) {
    const i64 j = static_cast<i64>(rng.next_below(static_cast<u64>(i + 1)));
    std::swap(stubs[i], stubs[j]);
  }

  std::set<std::pair<i32, i32>> edges;  // canonical (min, max) pairs
  auto add_edge = [&](i32 u, i32 v) -> bool {
    if (u == v) return false;
    if (u > v) std::swap(u, v);
    return edges.emplace(u, v).second;
  };
  for (size_t i = 0; i + 1 < stubs.size(); i += 2) add_edge(stubs[i], stubs[i + 1]);

  // Dedup and self-loop losses: draw replacement endpoints from the stub
  // distribution so added edges still prefer heavy nodes.
  i64 attempts = 0;
  const i64 attempt_cap = 64 * edges_target + 4096;
  while (static_cast<i64>(edges.size()) < edges_target && attempts < attempt_cap) {
    ++attempts;
    const i32 u = stubs[rng.next_below(static_cast<u64>(stubs.size()))];
    const i32 v = stubs[rng.next_below(static_cast<u64>(stubs.size()))];
    add_edge(u, v);
  }
  // Uniform fallback only matters for near-complete graphs.
  while (static_cast<i64>(edges.size()) < edges_target) {
    const i32 u = static_cast<i32>(rng.next_below(static_cast<u64>(n)));
    const i32 v = static_cast<i32>(rng.next_below(static_cast<u64>(n)));
    add_edge(u, v);
  }

  std::vector<std::tuple<i32, i32, i32>> trip;
  trip.reserve(edges.size() * 2);
  for (const auto& [u, v] : edges) {
    trip.emplace_back(u, v, 1);
    trip.emplace_back(v, u, 1);
  }
  return csr_from_triplets(n, n, std::move(trip));
}

// Uniform random sparse matrix with the given nonzero density.  Values are
// drawn uniformly from [value_lo, value_hi]; zero draws are bumped to 1 so
// every stored entry is structurally meaningful.
inline CsrMatrix gen_random_sparse(i32 n_rows, i32 n_cols, double density, u64 seed,
                                   i32 value_lo = -8, i32 value_hi = 8) {
  if (n_rows < 0 || n_cols < 0) throw ParamError("gen_random_sparse: negative dims");
  if (density < 0.0 || density > 1.0) throw ParamError("gen_random_sparse: density out of [0,1]");
  if (value_lo > value_hi) throw ParamError("gen_random_sparse: empty value range");
  Rng rng(seed);
  std::vector<std::tuple<i32, i32, i32>> trip;
  for (i32 r = 0; r < n_rows; ++r) {
    for (i32 c = 0; c < n_cols; ++c) {
      if (rng.next_real() < density) {
        i32 v = static_cast<i32>(rng.next_in(value_lo, value_hi));
        if (v == 0) v = 1;
        trip.emplace_back(r, c, v);
      }
    }
  }
  return csr_from_triplets(n_rows, n_cols, std::move(trip));
}

inline DenseMatrix gen_random_dense(i32 n_rows, i32 n_cols, u64 seed,
                                    i32 value_lo = -8, i32 value_hi = 8) {
  if (n_rows < 0 || n_cols < 0) throw ParamError("gen_random_dense: negative dims");
  if (value_lo > value_hi) throw ParamError("gen_random_dense: empty value range");
  Rng rng(seed);
  DenseMatrix m = make_dense(n_rows, n_cols);
  for (i32& v : m.data) v = static_cast<i32>(rng.next_in(value_lo, value_hi));
  return m;
}

}  // namespace fv
