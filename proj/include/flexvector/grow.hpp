#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "flexvector/config.hpp"
#include "flexvector/csr.hpp"
#include "flexvector/metrics.hpp"
#include "flexvector/machine.hpp"
#include "flexvector/reference.hpp"
#include "flexvector/types.hpp"

namespace fv {

// Cache-centric baseline machine.  It shares the lanes and the DRAM channel
// with the main design but has no vector register file: the sparse operand
// is processed in full-width row bands; per band the most frequently
// referenced dense rows are preloaded into the buffer, and every access to
// any other row is a miss served by a demand fetch of the whole dense row,
// with fetched rows not retained.  Execution runs ahead: a row stalled on
// its fetch is skipped and later ready rows execute, as long as they sit no
// more than lookahead_depth rows past the oldest incomplete row.  With at
// least two buffers the next band overlaps the current band's drain.
inline SimResult simulate_grow(const CsrMatrix& a, const DenseMatrix& dense,
                               const MachineConfig& cfg) {
  validate(cfg);
  if (a.n_cols != dense.n_rows)
    throw ShapeError("baseline: operand shapes do not chain");

  SimResult res;
  res.output = spmm_reference(a, dense);
  EventCounters& c = res.report.counters;

  const i32 F = dense.n_cols;
  const i32 eb = cfg.element_bytes();
  const i64 row_bytes = static_cast<i64>(F) * eb;
  const i64 beats = cfg.beats(F);
  const i64 cap_rows = row_bytes > 0 ? cfg.grow_dense_capacity() / row_bytes : 0;
  const i64 lat = cfg.timing.dram_latency_cycles;
  const i64 bw = cfg.timing.dram_bytes_per_cycle;
  const i32 la = cfg.grow.lookahead_depth;
  auto xfer = [&](i64 bytes) { return lat + ceil_div(bytes, bw); };

  i64 dram_free = 0, lanes_free = 0;
  i64 horizon = 0;
  std::vector<i64> band_store_end;

  const i32 band_h = cfg.grow.cluster_rows;
  const i32 n_bands = a.n_rows > 0 ? ceil_div(a.n_rows, band_h) : 0;
  for (i32 b = 0; b < n_bands; ++b) {
    const i32 r0 = b * band_h;
    const i32 r1 = std::min(a.n_rows, r0 + band_h);
    const i32 nrows = r1 - r0;

    // Static preload decision: most-referenced dense rows of this band,
    // ties to the lower row id.
    std::map<i32, i64> refs;
    i64 band_nnz = 0;
    for (i32 r = r0; r < r1; ++r)
      for (i64 z = a.row_ptr[r]; z < a.row_ptr[r + 1]; ++z) {
        refs[a.col_idx[static_cast<size_t>(z)]] += 1;
        ++band_nnz;
      }
    std::vector<std::pair<i32, i64>> by_ref(refs.begin(), refs.end());
    std::stable_sort(by_ref.begin(), by_ref.end(),
                     [](const auto& x, const auto& y) {
                       if (x.second != y.second) return x.second > y.second;
                       return x.first < y.first;
                     });
    std::set<i32> preloaded;
    for (const auto& [col, n] : by_ref) {
      if (static_cast<i64>(preloaded.size()) >= cap_rows) break;
      preloaded.insert(col);
    }

    // Double buffering keeps two bands in flight; a single buffer drains
    // the previous band completely before the next one loads.
    i64 band_gate = 0;
    if (cfg.grow.multi_buffer <= 1) {
      if (b >= 1) band_gate = band_store_end[static_cast<size_t>(b - 1)];
    } else if (b >= 2) {
      band_gate = band_store_end[static_cast<size_t>(b - 2)];
    }

    const i64 sparse_bytes =
        4 * static_cast<i64>(nrows + 1) + band_nnz * static_cast<i64>(2 + eb);
    const i64 sparse_end = std::max(dram_free, band_gate) + xfer(sparse_bytes);
    dram_free = sparse_end;
    c.dram_read_bits += 8 * sparse_bytes;
    c.dram_accesses += 1;
    c.sram_sparse_accesses += ceil_div(sparse_bytes, 4);

    i64 preload_end = sparse_end;
    if (!preloaded.empty()) {
      const i64 bytes = static_cast<i64>(preloaded.size()) * row_bytes;
      preload_end = dram_free + xfer(bytes);
      dram_free = preload_end;
      c.dram_read_bits += 8 * bytes;
      c.dram_accesses += 1;
      c.sram_dense_accesses += ceil_div(bytes * 8, cfg.vlen_bits);
    }

    // Per-row work and miss lists.
    std::vector<i64> row_nnz(static_cast<size_t>(nrows), 0);
    std::vector<std::vector<i32>> row_miss(static_cast<size_t>(nrows));
    for (i32 r = r0; r < r1; ++r)
      for (i64 z = a.row_ptr[r]; z < a.row_ptr[r + 1]; ++z) {
        row_nnz[static_cast<size_t>(r - r0)] += 1;
        const i32 col = a.col_idx[static_cast<size_t>(z)];
        if (!preloaded.count(col)) row_miss[static_cast<size_t>(r - r0)].push_back(col);
      }

    // Run-ahead event loop.  Fetches issue in row order; compute picks the
    // lowest ready row, skipping rows still waiting on their fetch; both
    // are confined to a window of lookahead_depth rows past the oldest
    // incomplete row.
    std::vector<i64> data_ready(static_cast<size_t>(nrows), -1);
    std::vector<char> done(static_cast<size_t>(nrows), 0);
    std::vector<i64> compute_end(static_cast<size_t>(nrows), 0);
    i32 next_fetch = 0, oldest = 0, remaining = nrows;
    i64 band_last_compute = sparse_end;

    for (i32 r = 0; r < nrows; ++r)
      if (row_nnz[static_cast<size_t>(r)] == 0) {  // nothing to do for this row
        done[static_cast<size_t>(r)] = 1;
        --remaining;
      }
    while (oldest < nrows && done[static_cast<size_t>(oldest)]) ++oldest;

    auto issue_fetches = [&](i32 r) {
      i64 end = preload_end;
      for (i32 col : row_miss[static_cast<size_t>(r)]) {
        (void)col;
        end = std::max(dram_free, preload_end) + xfer(row_bytes);
        dram_free = end;
        c.dram_read_bits += 8 * row_bytes;
        c.dram_accesses += 1;
        c.vrf_miss_count += 1;
        c.instructions += 1;  // one fine-grained row-fetch op per miss
        c.sram_dense_accesses += ceil_div(row_bytes * 8, cfg.vlen_bits);
      }
      data_ready[static_cast<size_t>(r)] = end;
    };

    while (remaining > 0) {
      while (next_fetch < nrows &&
             (done[static_cast<size_t>(next_fetch)] ||
              data_ready[static_cast<size_t>(next_fetch)] >= 0))
        ++next_fetch;
      const i32 limit = std::min(nrows, oldest + la);

      // Fetch candidate: next unfetched row inside the window.
      const bool can_fetch = next_fetch < limit;
      const i64 fetch_at = can_fetch ? std::max(dram_free, preload_end) : 0;

      // Compute candidate: lowest ready row in the window; if none is ready
      // by the time the lanes free up, the earliest-arriving one.
      i32 pick = -1;
      for (i32 r = oldest; r < limit; ++r) {
        if (done[static_cast<size_t>(r)] || data_ready[static_cast<size_t>(r)] < 0)
          continue;
        if (data_ready[static_cast<size_t>(r)] <= lanes_free) {
          pick = r;
          break;
        }
        if (pick < 0 || data_ready[static_cast<size_t>(r)] <
                            data_ready[static_cast<size_t>(pick)])
          pick = r;
      }
      const i64 pick_start =
          pick < 0 ? 0 : std::max(lanes_free, data_ready[static_cast<size_t>(pick)]);

      if (can_fetch && (pick < 0 || fetch_at <= pick_start)) {
        issue_fetches(next_fetch);
        continue;
      }
      if (pick < 0)
        throw Error("baseline scheduler wedged");  // unreachable: window holds oldest

      const i64 ce = pick_start + row_nnz[static_cast<size_t>(pick)] * beats +
                     cfg.timing.writeback_cycles;
      lanes_free = ce;
      compute_end[static_cast<size_t>(pick)] = ce;
      band_last_compute = std::max(band_last_compute, ce);
      done[static_cast<size_t>(pick)] = 1;
      --remaining;
      while (oldest < nrows && done[static_cast<size_t>(oldest)]) ++oldest;
      c.mac_ops += row_nnz[static_cast<size_t>(pick)] * beats;
      c.sram_sparse_accesses += row_nnz[static_cast<size_t>(pick)];
      c.sram_dense_accesses += row_nnz[static_cast<size_t>(pick)] * beats + beats;
      c.instructions += 2 * row_nnz[static_cast<size_t>(pick)];  // move+mac per nonzero
    }
    const i64 st_bytes = static_cast<i64>(nrows) * row_bytes;
    const i64 se = std::max(dram_free, band_last_compute) + xfer(st_bytes);
    dram_free = se;
    band_store_end.push_back(se);
    horizon = std::max(horizon, se);
    c.dram_write_bits += 8 * st_bytes;
    c.dram_accesses += 1;
    c.sram_dense_accesses += ceil_div(st_bytes * 8, cfg.vlen_bits);
  }

  c.cycles = horizon;
  res.report.miss_kind = "dense_row_miss";
  res.report.energy =
      energy(c, cfg.energy, cfg.grow_dense_capacity(), cfg.grow.sparse_buffer_bytes);
  res.report.area_um2 = area_grow(cfg).total_um2;
  res.report.config_hash = config_hash(cfg);
  return res;
}

}  // namespace fv
