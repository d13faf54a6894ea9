#pragma once

#include <string>
#include <utility>
#include <vector>

#include "flexvector/compiler.hpp"
#include "flexvector/config.hpp"
#include "flexvector/csr.hpp"
#include "flexvector/grow.hpp"
#include "flexvector/machine.hpp"
#include "flexvector/metrics.hpp"
#include "flexvector/partition.hpp"
#include "flexvector/reference.hpp"
#include "flexvector/tiles.hpp"
#include "flexvector/topk.hpp"
#include "flexvector/types.hpp"
#include "flexvector/vertex_cut.hpp"

namespace fv {

struct PipelineResult {
  Partition part;
  Program prog;
  SimResult sim;       // machine-row-order output plus report and trace
  DenseMatrix output;  // original row order
  bool oracle_ok = false;
};

// Full preprocessing + compile + simulate chain for one sparse-times-dense
// product, with the result checked bit-for-bit against the software
// reference.  A square operand is treated as graph adjacency: both sides are
// relabeled by the partition and the dense operand's rows follow; a
// rectangular operand keeps its column space and the dense operand as-is.
inline PipelineResult run_flexvector(const CsrMatrix& a, const DenseMatrix& dense,
                                     const MachineConfig& cfg,
                                     const Partition* part_override = nullptr,
                                     bool want_trace = false) {
  validate(cfg);
  if (a.n_cols != dense.n_rows)
    throw ShapeError("operand shapes do not chain: " + std::to_string(a.n_cols) +
                     " vs " + std::to_string(dense.n_rows));

  PipelineResult r;
  if (part_override) {
    r.part = *part_override;
    if (r.part.tile_rows != cfg.tile_rows)
      throw ParamError("partition tile_rows differs from machine tile_rows");
  } else if (a.n_rows == a.n_cols) {
    r.part = edge_cut_partition(a, cfg.tile_rows);
  } else {
    r.part = identity_partition(a.n_rows, cfg.tile_rows);
  }
  validate(r.part);
  if (r.part.n_nodes() != a.n_rows)
    throw ShapeError("partition node count does not match operand rows");

  const bool permute_cols = a.n_rows == a.n_cols;
  const DenseMatrix d_perm = permute_cols ? permute_rows(dense, r.part.perm) : dense;

  std::vector<SparseTile> tiles = extract_tiles(a, r.part);
  tiles = vertex_cut_all(tiles, cfg.tau);
  const std::vector<TilePlan> plans = plan_tiles(tiles, cfg);
  r.prog = compile(plans, d_perm, a.n_rows, cfg);
  r.sim = simulate(r.prog, d_perm, cfg, want_trace);
  r.output = unpermute_rows(r.sim.output, r.part.perm);

  const DenseMatrix want = spmm_reference(a, dense);
  r.oracle_ok = r.output.n_rows == want.n_rows && r.output.n_cols == want.n_cols &&
                r.output.data == want.data;
  return r;
}

struct GrowResult {
  SimResult sim;
  bool oracle_ok = false;
};

inline GrowResult run_grow(const CsrMatrix& a, const DenseMatrix& dense,
                           const MachineConfig& cfg) {
  GrowResult r;
  r.sim = simulate_grow(a, dense, cfg);
  const DenseMatrix want = spmm_reference(a, dense);
  r.oracle_ok = r.sim.output.data == want.data;
  return r;
}

// Two back-to-back runs reported as one workload: counters and energy add,
// cycles add (the second product consumes the first one's output), hardware
// area is the same machine.
inline SimReport combine_reports(const SimReport& a, const SimReport& b,
                                 const std::string& label) {
  SimReport r;
  r.label = label;
  r.miss_kind = a.miss_kind;
  r.config_hash = a.config_hash;
  r.area_um2 = a.area_um2;
  auto add = [](i64 x, i64 y) { return x + y; };
  r.counters.cycles = add(a.counters.cycles, b.counters.cycles);
  r.counters.dram_read_bits = add(a.counters.dram_read_bits, b.counters.dram_read_bits);
  r.counters.dram_write_bits = add(a.counters.dram_write_bits, b.counters.dram_write_bits);
  r.counters.dram_accesses = add(a.counters.dram_accesses, b.counters.dram_accesses);
  r.counters.sram_dense_accesses =
      add(a.counters.sram_dense_accesses, b.counters.sram_dense_accesses);
  r.counters.sram_sparse_accesses =
      add(a.counters.sram_sparse_accesses, b.counters.sram_sparse_accesses);
  r.counters.vrf_reads = add(a.counters.vrf_reads, b.counters.vrf_reads);
  r.counters.vrf_writes = add(a.counters.vrf_writes, b.counters.vrf_writes);
  r.counters.vrf_miss_count = add(a.counters.vrf_miss_count, b.counters.vrf_miss_count);
  r.counters.mac_ops = add(a.counters.mac_ops, b.counters.mac_ops);
  r.counters.instructions = add(a.counters.instructions, b.counters.instructions);
  r.energy.dram_pj = a.energy.dram_pj + b.energy.dram_pj;
  r.energy.sram_dense_pj = a.energy.sram_dense_pj + b.energy.sram_dense_pj;
  r.energy.sram_sparse_pj = a.energy.sram_sparse_pj + b.energy.sram_sparse_pj;
  r.energy.vrf_pj = a.energy.vrf_pj + b.energy.vrf_pj;
  r.energy.mac_pj = a.energy.mac_pj + b.energy.mac_pj;
  r.energy.leakage_pj = a.energy.leakage_pj + b.energy.leakage_pj;
  r.energy.total_pj = a.energy.total_pj + b.energy.total_pj;
  return r;
}

struct GcnResult {
  PipelineResult stage1;  // features times weights
  PipelineResult stage2;  // propagation over the normalized adjacency
  SimReport combined;
  DenseMatrix output;
  bool oracle_ok = false;
};

// One graph-convolution layer: (features x weights) first, then the
// normalized adjacency applied to that product.  `a_hat` is expected to be
// normalized already.
inline GcnResult run_gcn_flexvector(const CsrMatrix& a_hat, const CsrMatrix& x,
                                    const DenseMatrix& w, const MachineConfig& cfg) {
  GcnResult r;
  r.stage1 = run_flexvector(x, w, cfg);
  r.stage2 = run_flexvector(a_hat, r.stage1.output, cfg);
  r.combined = combine_reports(r.stage1.sim.report, r.stage2.sim.report, "gcn");
  r.output = r.stage2.output;
  const DenseMatrix want = gcn_layer_reference(a_hat, x, w);
  r.oracle_ok = r.output.data == want.data && r.stage1.oracle_ok && r.stage2.oracle_ok;
  return r;
}

struct GcnGrowResult {
  GrowResult stage1;
  GrowResult stage2;
  SimReport combined;
  bool oracle_ok = false;
};

inline GcnGrowResult run_gcn_grow(const CsrMatrix& a_hat, const CsrMatrix& x,
                                  const DenseMatrix& w, const MachineConfig& cfg) {
  GcnGrowResult r;
  r.stage1 = run_grow(x, w, cfg);
  r.stage2 = run_grow(a_hat, r.stage1.sim.output, cfg);
  r.combined = combine_reports(r.stage1.sim.report, r.stage2.sim.report, "gcn");
  const DenseMatrix want = gcn_layer_reference(a_hat, x, w);
  r.oracle_ok = r.stage2.sim.output.data == want.data;
  return r;
}

}  // namespace fv
