#pragma once

#include <algorithm>
#include <unordered_map>
#include <utility>
#include <vector>

#include "flexvector/tiles.hpp"
#include "flexvector/types.hpp"

namespace fv {

// Tile-wide "hit set": the tau columns with the highest nonzero counts, ties
// toward the lower column index.  Returned sorted ascending for membership
// tests.
inline std::vector<i32> hit_set(const SparseTile& t, i32 tau) {
  const std::vector<i32> cnz = column_counts(t);
  std::vector<i32> cols;
  for (i32 c = 0; c < t.width; ++c)
    if (cnz[c] > 0) cols.push_back(c);
  std::stable_sort(cols.begin(), cols.end(),
                   [&](i32 x, i32 y) { return cnz[x] > cnz[y]; });
  if (static_cast<i32>(cols.size()) > tau) cols.resize(tau);
  std::sort(cols.begin(), cols.end());
  return cols;
}

// Splits every row with more than tau nonzeros into sub-rows of at most tau
// nonzeros.  Each long row is cut into K = ceil(rnz/tau) fragments; fragment i
// takes up to ceil(misses/K) columns outside the hit set (ascending column
// order) and then fills with columns inside the hit set (descending column
// order) up to tau.  Splitting a row this way spreads the rarely-reused
// columns across fragments while hot columns pad them, so each fragment's
// register demand stays bounded without losing any nonzero.  Rows at or under
// tau pass through untouched.
inline SparseTile vertex_cut(const SparseTile& tile, i32 tau) {
  if (tau < 1) throw ParamError("vertex_cut: tau must be at least 1");
  SparseTile out;
  out.tile_row = tile.tile_row;
  out.tile_col = tile.tile_col;
  out.width = tile.width;

  const std::vector<i32> hits = hit_set(tile, tau);
  auto is_hit = [&](i32 c) {
    return std::binary_search(hits.begin(), hits.end(), c);
  };

  // Sequence numbers count emitted fragments per parent row, so cutting an
  // already-cut tile keeps every fragment's sequence (the cut is idempotent).
  std::unordered_map<i32, i32> next_seq;
  for (const SubRow& row : tile.rows) {
    i32& seq = next_seq[row.parent_row];
    if (row.nnz() <= tau) {
      SubRow copy = row;
      copy.split_seq = seq++;
      out.rows.push_back(std::move(copy));
      continue;
    }
    // (column, value) worklists; columns of a row are unique, so membership
    // partitions the row exactly.
    std::vector<std::pair<i32, i32>> miss_list, hit_list;
    for (i32 i = 0; i < row.nnz(); ++i) {
      if (is_hit(row.col_idx[i]))
        hit_list.emplace_back(row.col_idx[i], row.values[i]);
      else
        miss_list.emplace_back(row.col_idx[i], row.values[i]);
    }
    // miss_list pops ascending, hit_list pops descending column index.
    std::sort(miss_list.begin(), miss_list.end());
    std::sort(hit_list.begin(), hit_list.end(), std::greater<>());

    const i32 k_splits = static_cast<i32>(ceil_div(row.nnz(), tau));
    const i32 n_miss = static_cast<i32>(ceil_div(static_cast<i64>(miss_list.size()), k_splits));
    size_t mp = 0, hp = 0;
    for (i32 s = 0; s < k_splits; ++s) {
      if (mp >= miss_list.size() && hp >= hit_list.size()) break;
      SubRow frag;
      frag.parent_row = row.parent_row;
      frag.split_seq = seq++;
      std::vector<std::pair<i32, i32>> taken;
      for (i32 i = 0; i < n_miss && mp < miss_list.size(); ++i) taken.push_back(miss_list[mp++]);
      while (static_cast<i32>(taken.size()) < tau && hp < hit_list.size())
        taken.push_back(hit_list[hp++]);
      std::sort(taken.begin(), taken.end());
      for (const auto& [c, v] : taken) {
        frag.col_idx.push_back(c);
        frag.values.push_back(v);
      }
      out.rows.push_back(std::move(frag));
    }
  }
  refresh_max_rnz(out);
  return out;
}

inline std::vector<SparseTile> vertex_cut_all(const std::vector<SparseTile>& tiles, i32 tau) {
  std::vector<SparseTile> out;
  out.reserve(tiles.size());
  for (const SparseTile& t : tiles) out.push_back(vertex_cut(t, tau));
  return out;
}

}  // namespace fv
