#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "flexvector/config.hpp"
#include "flexvector/tiles.hpp"
#include "flexvector/types.hpp"

namespace fv {

// Columns of a tile ordered by descending nonzero count, ties toward the
// lower column index.  Only columns that actually occur are listed.
inline std::vector<i32> columns_by_count(const SparseTile& t) {
  const std::vector<i32> cnz = column_counts(t);
  std::vector<i32> cols;
  for (i32 c = 0; c < t.width; ++c)
    if (cnz[c] > 0) cols.push_back(c);
  std::stable_sort(cols.begin(), cols.end(),
                   [&](i32 x, i32 y) { return cnz[x] > cnz[y]; });
  return cols;
}

namespace detail {

// The two largest per-sub-row miss counts against a candidate prefix of size
// k of the popularity ordering.
inline std::pair<i32, i32> top2_misses(const SparseTile& t,
                                       const std::vector<i32>& by_count, i32 k) {
  std::vector<char> fixed(t.width, 0);
  for (i32 i = 0; i < k && i < static_cast<i32>(by_count.size()); ++i)
    fixed[by_count[i]] = 1;
  i32 m0 = 0, m1 = 0;
  for (const SubRow& r : t.rows) {
    i32 miss = 0;
    for (i32 c : r.col_idx)
      if (!fixed[c]) ++miss;
    if (miss > m0) {
      m1 = m0;
      m0 = miss;
    } else if (miss > m1) {
      m1 = miss;
    }
  }
  return {m0, m1};
}

}  // namespace detail

// Whether reserving k register rows for the k most popular columns leaves
// enough dynamic rows for the worst sub-row (single buffering) or the worst
// two consecutive sub-rows (double buffering) within depth d.
inline bool fixed_k_fits(const SparseTile& t, const std::vector<i32>& by_count,
                         i32 k, i32 d, VrfMode mode) {
  const auto [m0, m1] = detail::top2_misses(t, by_count, k);
  if (mode == VrfMode::kSingle) return k + m0 <= d;
  return k + m0 + m1 <= d;
}

// Chooses how many register rows to reserve for popular columns.  The search
// starts from ceil(tau * pct) and walks in one direction only: upward while
// the fit test passes (returning the last passing k, at most d), downward
// until it first passes otherwise (returning 0 when nothing fits).  Larger k
// is preferred because resident rows never reload.
inline i32 topk_fixed(const SparseTile& tile, i32 tau, double pct, i32 d, VrfMode mode) {
  if (tau < 1) throw ParamError("topk_fixed: tau must be at least 1");
  if (d < 0) throw ParamError("topk_fixed: negative register depth");
  if (pct < 0.0 || pct > 1.0) throw ParamError("topk_fixed: pct out of [0,1]");
  const std::vector<i32> by_count = columns_by_count(tile);
  i32 k = std::min(d, static_cast<i32>(std::ceil(tau * pct)));
  k = std::max(k, 0);
  if (fixed_k_fits(tile, by_count, k, d, mode)) {
    while (k + 1 <= d && fixed_k_fits(tile, by_count, k + 1, d, mode)) ++k;
    return k;
  }
  while (k > 0) {
    --k;
    if (fixed_k_fits(tile, by_count, k, d, mode)) return k;
  }
  return 0;
}

// Per-tile execution plan: which dense rows the tile touches (machine row
// ids, sorted), and which of them stay resident in the fixed register region.
struct TilePlan {
  SparseTile tile;
  i32 k = 0;
  std::vector<i32> fixed_cols;      // tile-local columns held resident
  std::vector<i32> dense_row_ids;   // machine-space dense rows this tile reads
};

// Runs the fixed-region selection for every tile.  Tiles are expected to be
// restructured already so each sub-row fits the dynamic region.
inline std::vector<TilePlan> plan_tiles(const std::vector<SparseTile>& tiles,
                                        const MachineConfig& cfg) {
  std::vector<TilePlan> plans;
  plans.reserve(tiles.size());
  for (const SparseTile& t : tiles) {
    TilePlan p;
    p.tile = t;
    if (cfg.fixed_k_override >= 0) {
      p.k = std::min<i32>(cfg.fixed_k_override, cfg.vrf_depth);
    } else {
      p.k = topk_fixed(t, cfg.tau, cfg.topk_start_pct, cfg.vrf_depth, cfg.vrf_mode);
    }
    const std::vector<i32> by_count = columns_by_count(t);
    for (i32 i = 0; i < p.k && i < static_cast<i32>(by_count.size()); ++i)
      p.fixed_cols.push_back(by_count[i]);
    std::sort(p.fixed_cols.begin(), p.fixed_cols.end());
    std::vector<char> seen(t.width, 0);
    for (const SubRow& r : t.rows)
      for (i32 c : r.col_idx) seen[c] = 1;
    for (i32 c = 0; c < t.width; ++c)
      if (seen[c])
        p.dense_row_ids.push_back(t.tile_col * cfg.tile_rows + c);
    plans.push_back(std::move(p));
  }
  return plans;
}

}  // namespace fv
