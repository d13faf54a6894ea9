#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "flexvector/csr.hpp"
#include "flexvector/partition.hpp"
#include "flexvector/types.hpp"

namespace fv {

// One stored row fragment of a tile.  col_idx holds tile-local column
// positions, sorted ascending; values run parallel to it.  split_seq is 0 for
// rows that were never split and counts up across the fragments of one parent
// row otherwise.
struct SubRow {
  i32 parent_row = 0;  // local row position within the tile
  i32 split_seq = 0;
  std::vector<i32> col_idx;
  std::vector<i32> values;

  i32 nnz() const { return static_cast<i32>(col_idx.size()); }
};

// A tile_rows x tile_rows block of the relabeled sparse operand.  Only
// non-empty tiles are materialized.
struct SparseTile {
  i32 tile_row = 0;
  i32 tile_col = 0;
  i32 width = 0;  // column span of this block (tile_rows except at the edge)
  std::vector<SubRow> rows;
  i32 max_rnz = 0;  // largest sub-row nnz

  i64 nnz() const {
    i64 total = 0;
    for (const SubRow& r : rows) total += r.nnz();
    return total;
  }
};

inline void refresh_max_rnz(SparseTile& t) {
  t.max_rnz = 0;
  for (const SubRow& r : t.rows) t.max_rnz = std::max(t.max_rnz, r.nnz());
}

// Nonzero count per tile-local column, aggregated over all sub-rows.
inline std::vector<i32> column_counts(const SparseTile& t) {
  std::vector<i32> cnz(t.width, 0);
  for (const SubRow& r : t.rows)
    for (i32 c : r.col_idx) ++cnz[c];
  return cnz;
}

// Relabels the matrix by the partition and slices it into tile_rows-sized
// blocks.  Row fragments keep tile-local coordinates; empty tiles and empty
// rows are omitted.  Tiles come back sorted by (tile_row, tile_col).
inline std::vector<SparseTile> extract_tiles(const CsrMatrix& a, const Partition& part) {
  validate(part);
  const CsrMatrix b = permute_matrix(a, part);
  const i32 tr = part.tile_rows;
  std::map<std::pair<i32, i32>, SparseTile> tiles;
  for (i32 r = 0; r < b.n_rows; ++r) {
    i64 p = b.row_ptr[r];
    const i64 pe = b.row_ptr[r + 1];
    while (p < pe) {
      const i32 tile_col = b.col_idx[p] / tr;
      SubRow sub;
      sub.parent_row = r % tr;
      while (p < pe && b.col_idx[p] / tr == tile_col) {
        sub.col_idx.push_back(b.col_idx[p] % tr);
        sub.values.push_back(b.values[p]);
        ++p;
      }
      SparseTile& t = tiles[{r / tr, tile_col}];
      t.tile_row = r / tr;
      t.tile_col = tile_col;
      t.width = static_cast<i32>(std::min<i64>(tr, static_cast<i64>(b.n_cols) - static_cast<i64>(tile_col) * tr));
      t.max_rnz = std::max(t.max_rnz, sub.nnz());
      t.rows.push_back(std::move(sub));
    }
  }
  std::vector<SparseTile> out;
  out.reserve(tiles.size());
  for (auto& [key, t] : tiles) {
    (void)key;
    out.push_back(std::move(t));
  }
  return out;
}

// Folds a tile list back into triplet form in the original (pre-relabel)
// coordinate space of the permuted matrix; fragments of a split row merge by
// addition.  Used to check that restructuring preserved the operand.
inline CsrMatrix tiles_to_csr(const std::vector<SparseTile>& tiles, i32 n_rows,
                              i32 n_cols, i32 tile_rows) {
  std::map<std::pair<i32, i32>, i32> acc;
  for (const SparseTile& t : tiles)
    for (const SubRow& r : t.rows)
      for (i32 i = 0; i < r.nnz(); ++i) {
        const i32 gr = t.tile_row * tile_rows + r.parent_row;
        const i32 gc = t.tile_col * tile_rows + r.col_idx[i];
        acc[{gr, gc}] = wrap_add(acc[{gr, gc}], r.values[i]);
      }
  std::vector<std::tuple<i32, i32, i32>> trip;
  trip.reserve(acc.size());
  for (const auto& [rc, v] : acc) trip.emplace_back(rc.first, rc.second, v);
  return csr_from_triplets(n_rows, n_cols, std::move(trip));
}

}  // namespace fv
