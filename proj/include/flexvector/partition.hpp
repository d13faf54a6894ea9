#pragma once

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "flexvector/csr.hpp"
#include "flexvector/types.hpp"

namespace fv {

// Node relabeling used to cluster connected nodes into the same tile-row
// window.  perm maps old node id -> new node id and is a bijection on
// [0, n_nodes).
struct Partition {
  std::vector<i32> perm;
  i32 tile_rows = 0;
  i32 n_tiles_per_dim = 0;

  i32 n_nodes() const { return static_cast<i32>(perm.size()); }
};

inline void validate(const Partition& p) {
  if (p.tile_rows <= 0) throw ParamError("partition: tile_rows must be positive");
  std::vector<char> seen(p.perm.size(), 0);
  for (i32 v : p.perm) {
    if (v < 0 || v >= static_cast<i32>(p.perm.size()) || seen[v])
      throw ParamError("partition: perm is not a bijection");
    seen[v] = 1;
  }
  if (p.n_tiles_per_dim != static_cast<i32>(ceil_div(static_cast<i64>(p.perm.size()), p.tile_rows)))
    throw ParamError("partition: n_tiles_per_dim inconsistent");
}

inline Partition identity_partition(i32 n_nodes, i32 tile_rows) {
  if (tile_rows <= 0) throw ParamError("partition: tile_rows must be positive");
  Partition p;
  p.perm.resize(n_nodes);
  std::iota(p.perm.begin(), p.perm.end(), 0);
  p.tile_rows = tile_rows;
  p.n_tiles_per_dim = static_cast<i32>(ceil_div(n_nodes, tile_rows));
  return p;
}

// Greedy BFS clustering: visit order restarts from the highest-degree
// unvisited node whenever the frontier drains (ties break toward the lower
// node id), neighbors enter the frontier in ascending id order, and
// consecutive windows of tile_rows visited nodes become the tile blocks.
// Neighboring nodes therefore tend to share a block, which keeps edges inside
// tiles.
inline Partition edge_cut_partition(const CsrMatrix& a, i32 tile_rows) {
  if (a.n_rows != a.n_cols) throw ShapeError("edge_cut_partition: matrix must be square");
  if (tile_rows <= 0) throw ParamError("edge_cut_partition: tile_rows must be positive");
  const i32 n = a.n_rows;
  std::vector<i32> order;
  order.reserve(n);
  std::vector<char> visited(n, 0);

  std::vector<i32> by_degree(n);
  std::iota(by_degree.begin(), by_degree.end(), 0);
  std::stable_sort(by_degree.begin(), by_degree.end(), [&](i32 x, i32 y) {
    return a.row_nnz(x) > a.row_nnz(y);
  });
  size_t seed_cursor = 0;

  std::deque<i32> frontier;
  while (static_cast<i32>(order.size()) < n) {
    if (frontier.empty()) {
      while (visited[by_degree[seed_cursor]]) ++seed_cursor;
      frontier.push_back(by_degree[seed_cursor]);
      visited[by_degree[seed_cursor]] = 1;
    }
    const i32 u = frontier.front();
    frontier.pop_front();
    order.push_back(u);
    for (i64 p = a.row_ptr[u]; p < a.row_ptr[u + 1]; ++p) {
      const i32 v = a.col_idx[p];
      if (!visited[v]) {
        visited[v] = 1;
        frontier.push_back(v);
      }
    }
  }

  Partition part;
  part.perm.resize(n);
  for (i32 newid = 0; newid < n; ++newid) part.perm[order[newid]] = newid;
  part.tile_rows = tile_rows;
  part.n_tiles_per_dim = static_cast<i32>(ceil_div(n, tile_rows));
  return part;
}

// Ingests an externally computed node->block assignment (e.g. from a graph
// partitioner): one block id per line, node order.  Nodes are relabeled so
// blocks become contiguous, preserving the original node order inside each
// block.
inline Partition load_external_partition(const std::string& path, i32 n_nodes,
                                         i32 tile_rows) {
  if (tile_rows <= 0) throw ParamError("partition: tile_rows must be positive");
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path);
  std::vector<i64> block;
  block.reserve(n_nodes);
  std::string line;
  i64 line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i == line.size() || line[i] == '#') continue;
    std::istringstream ls(line);
    i64 b;
    if (!(ls >> b) || b < 0)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected a block id");
    block.push_back(b);
  }
  if (static_cast<i32>(block.size()) != n_nodes)
    throw ParseError(path + ": " + std::to_string(block.size()) +
                     " assignments for " + std::to_string(n_nodes) + " nodes");
  const i64 n_blocks = ceil_div(n_nodes, tile_rows);
  for (size_t i = 0; i < block.size(); ++i) {
    if (block[i] >= n_blocks)
      throw ParseError(path + ": block id " + std::to_string(block[i]) +
                       " out of range for " + std::to_string(n_blocks) + " blocks");
  }

  std::vector<i32> order(n_nodes);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](i32 x, i32 y) { return block[x] < block[y]; });
  Partition part;
  part.perm.resize(n_nodes);
  for (i32 newid = 0; newid < n_nodes; ++newid) part.perm[order[newid]] = newid;
  part.tile_rows = tile_rows;
  part.n_tiles_per_dim = static_cast<i32>(n_blocks);
  return part;
}

// Applies the relabeling to a matrix: rows always, columns only when the
// matrix is square over the same id space (a relabeled graph keeps both sides
// consistent; a node-by-feature matrix keeps its feature axis untouched).
inline CsrMatrix permute_matrix(const CsrMatrix& a, const Partition& part) {
  if (a.n_rows != part.n_nodes())
    throw ShapeError("permute: partition covers " + std::to_string(part.n_nodes()) +
                     " nodes, matrix has " + std::to_string(a.n_rows) + " rows");
  const bool permute_cols = a.n_rows == a.n_cols;
  std::vector<std::tuple<i32, i32, i32>> trip;
  trip.reserve(static_cast<size_t>(a.nnz()));
  for (i32 r = 0; r < a.n_rows; ++r)
    for (i64 p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p)
      trip.emplace_back(part.perm[r],
                        permute_cols ? part.perm[a.col_idx[p]] : a.col_idx[p],
                        a.values[p]);
  return csr_from_triplets(a.n_rows, a.n_cols, std::move(trip));
}

inline DenseMatrix permute_rows(const DenseMatrix& d, const std::vector<i32>& perm) {
  if (d.n_rows != static_cast<i32>(perm.size()))
    throw ShapeError("permute_rows: perm size mismatch");
  DenseMatrix out = make_dense(d.n_rows, d.n_cols);
  for (i32 r = 0; r < d.n_rows; ++r)
    std::copy_n(&d.data[static_cast<i64>(r) * d.n_cols], d.n_cols,
                &out.data[static_cast<i64>(perm[r]) * d.n_cols]);
  return out;
}

inline DenseMatrix unpermute_rows(const DenseMatrix& d, const std::vector<i32>& perm) {
  if (d.n_rows != static_cast<i32>(perm.size()))
    throw ShapeError("unpermute_rows: perm size mismatch");
  DenseMatrix out = make_dense(d.n_rows, d.n_cols);
  for (i32 r = 0; r < d.n_rows; ++r)
    std::copy_n(&d.data[static_cast<i64>(perm[r]) * d.n_cols], d.n_cols,
                &out.data[static_cast<i64>(r) * d.n_cols]);
  return out;
}

// Number of edges (u,v), u < v, whose endpoints land in different tile-row
// blocks under the partition.  Diagnostic for partition quality.
inline i64 count_cross_tile_edges(const CsrMatrix& a, const Partition& part) {
  if (a.n_rows != a.n_cols) throw ShapeError("cross_tile_edges: matrix must be square");
  i64 cross = 0;
  for (i32 r = 0; r < a.n_rows; ++r)
    for (i64 p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
      const i32 c = a.col_idx[p];
      if (r < c && part.perm[r] / part.tile_rows != part.perm[c] / part.tile_rows) ++cross;
    }
  return cross;
}

}  // namespace fv
