#pragma once

#include <string>
#include <utility>
#include <vector>

#include "flexvector/config.hpp"
#include "flexvector/csr.hpp"
#include "flexvector/generate.hpp"
#include "flexvector/metrics.hpp"
#include "flexvector/pipeline.hpp"
#include "flexvector/reference.hpp"
#include "flexvector/types.hpp"

namespace fv {

struct AblationStage {
  std::string label;
  MachineConfig cfg;
};

namespace detail {

inline i32 even_up(i32 x) { return x + (x & 1); }

}  // namespace detail

// The staged feature ladder, cumulative left to right:
//   vector_m1    narrow machine: single dynamic region, one buffer slot,
//                no row restructuring, nothing pinned
//   vector_m6    + multi-buffering
//   double_vrf   + alternating dynamic slots
//   vertex_cut   + row restructuring with the configured tau and depth
//   flexible_k   + per-tile pinned-region sizing
inline std::vector<AblationStage> ablation_stages(const MachineConfig& base) {
  std::vector<AblationStage> stages;
  MachineConfig c = base;
  c.vrf_mode = VrfMode::kSingle;
  c.multi_buffer = 1;
  c.tau = c.tile_rows;
  c.vrf_depth = c.tile_rows;
  c.fixed_k_override = 0;
  stages.push_back({"vector_m1", c});

  c.multi_buffer = base.multi_buffer;
  stages.push_back({"vector_m6", c});

  c.vrf_mode = VrfMode::kDouble;
  c.vrf_depth = detail::even_up(c.tile_rows);
  stages.push_back({"double_vrf", c});

  c.tau = base.tau;
  c.vrf_depth = detail::even_up(base.vrf_depth);
  stages.push_back({"vertex_cut", c});

  c.fixed_k_override = -1;
  stages.push_back({"flexible_k", c});

  for (AblationStage& s : stages) validate(s.cfg);
  return stages;
}

// Baseline machine first, then the five staged configurations, all on the
// same operands.  Every staged run is value-checked against the reference.
inline std::vector<SimReport> run_ablation(const CsrMatrix& a, const DenseMatrix& dense,
                                           const MachineConfig& base) {
  std::vector<SimReport> out;
  GrowResult g = run_grow(a, dense, base);
  if (!g.oracle_ok) throw Error("baseline run diverged from the reference result");
  g.sim.report.label = "baseline";
  out.push_back(g.sim.report);
  for (const AblationStage& s : ablation_stages(base)) {
    PipelineResult r = run_flexvector(a, dense, s.cfg);
    if (!r.oracle_ok)
      throw Error("ablation stage " + s.label + " diverged from the reference result");
    r.sim.report.label = s.label;
    out.push_back(r.sim.report);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Workload builders
// ---------------------------------------------------------------------------

struct GcnProblem {
  CsrMatrix a_hat;  // normalized adjacency
  CsrMatrix x;      // node features, kept sparse for the first product
  DenseMatrix w;    // layer weights
};

inline GcnProblem make_gcn_problem(const CsrMatrix& graph, i32 f_in, i32 f_out,
                                   u64 seed) {
  if (graph.n_rows != graph.n_cols)
    throw ShapeError("layer builder expects a square adjacency matrix");
  GcnProblem p;
  p.a_hat = normalize_adjacency(graph);
  p.x = gen_random_sparse(graph.n_rows, f_in, 0.35, seed ^ 0x5f0e1d2c3b4a5968ULL, -4, 4);
  p.w = gen_random_dense(f_in, f_out, seed ^ 0x2b1a09f8e7d6c5b4ULL, -4, 4);
  return p;
}

inline DenseMatrix make_dense_operand(i32 n_rows, i32 f, u64 seed) {
  return gen_random_dense(n_rows, f, seed, -8, 8);
}

}  // namespace fv
