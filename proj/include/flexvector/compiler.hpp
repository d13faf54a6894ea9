#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "flexvector/config.hpp"
#include "flexvector/csr.hpp"
#include "flexvector/isa.hpp"
#include "flexvector/tiles.hpp"
#include "flexvector/topk.hpp"
#include "flexvector/types.hpp"

namespace fv {

namespace detail {

// Header words (one per sub-row plus terminator) + per-nonzero index/value.
inline i64 sparse_tile_bytes(const SparseTile& t, i32 element_bytes) {
  return 4 * static_cast<i64>(t.rows.size() + 1) +
         t.nnz() * static_cast<i64>(2 + element_bytes);
}

}  // namespace detail

// Lower planned tiles to the instruction stream.
//
// The schedule is output-stationary over (row band, feature block) passes.
// Within a pass each reduction tile becomes one chunk:
//   CONFIG, LD_S, LD_D, CAL_IDX, MV_FIXED, then per sub-row an optional
//   MV_DYN (rows absent from the pinned region) followed by its CMP.
// The band's accumulated block is drained by a single ST_D per pass.
//
// `dense` is the stationary operand in machine (permuted) row order;
// `out_rows` fixes the result height (the sparse operand's row count).
inline Program compile(const std::vector<TilePlan>& plans, const DenseMatrix& dense,
                       i32 out_rows, const MachineConfig& cfg) {
  validate(cfg);
  const i32 T = cfg.tile_rows;
  const i32 eb = cfg.element_bytes();
  const i32 out_cols = dense.n_cols;
  if (out_rows < 0) throw ShapeError("compile: negative output row count");

  Program prog;
  prog.plans = plans;
  prog.out_rows = out_rows;
  prog.out_cols = out_cols;
  if (plans.empty() || out_cols == 0) return prog;

  // Band index: plans grouped by output row band, reduction order by tile_col.
  std::map<i32, std::vector<i32>> bands;
  for (i32 p = 0; p < static_cast<i32>(plans.size()); ++p) {
    const SparseTile& t = plans[p].tile;
    if (static_cast<i64>(t.tile_row) * T >= out_rows)
      throw ShapeError("compile: tile band beyond output rows");
    for (i32 id : plans[p].dense_row_ids)
      if (id >= dense.n_rows)
        throw ShapeError("compile: dense operand has no row " + std::to_string(id));
    bands[t.tile_row].push_back(p);
  }
  for (auto& [tr, ps] : bands)
    std::sort(ps.begin(), ps.end(), [&](i32 a, i32 b) {
      return plans[a].tile.tile_col < plans[b].tile.tile_col;
    });

  const i32 n_blocks = ceil_div(out_cols, T);
  i32 chunk_counter = 0;
  i64 dyn_counter = 0;  // ping/pong slot assignment across the whole program

  for (const auto& [tr, ps] : bands) {
    const i32 band_rows = std::min(T, out_rows - tr * T);
    for (i32 fc = 0; fc < n_blocks; ++fc) {
      const i32 col_begin = fc * T;
      const i32 col_end = std::min(out_cols, col_begin + T);
      std::vector<char> touched(static_cast<size_t>(T), 0);

      for (i32 p : ps) {
        const TilePlan& plan = plans[p];
        const SparseTile& t = plan.tile;
        if (plan.k > cfg.vrf_depth)
          throw CompileError("pinned region larger than the register file");
        const i32 dyn_budget = cfg.vrf_depth - plan.k;
        const i32 chunk = chunk_counter++;

        std::set<i32> fixed(plan.fixed_cols.begin(), plan.fixed_cols.end());

        Instruction config;
        config.op = Opcode::kConfig;
        config.tile = p;
        config.chunk = chunk;
        config.k = plan.k;
        prog.code.push_back(config);

        Instruction lds;
        lds.op = Opcode::kLdS;
        lds.tile = p;
        lds.chunk = chunk;
        lds.nnz = t.nnz();
        lds.bytes = detail::sparse_tile_bytes(t, eb);
        prog.code.push_back(lds);

        Instruction ldd;
        ldd.op = Opcode::kLdD;
        ldd.tile = p;
        ldd.chunk = chunk;
        ldd.dense_rows = plan.dense_row_ids;
        ldd.col_begin = col_begin;
        ldd.col_end = col_end;
        ldd.bytes = static_cast<i64>(ldd.dense_rows.size()) * (col_end - col_begin) * eb;
        prog.code.push_back(ldd);

        Instruction cal;
        cal.op = Opcode::kCalIdx;
        cal.tile = p;
        cal.chunk = chunk;
        cal.nnz = t.nnz();
        prog.code.push_back(cal);

        if (!plan.fixed_cols.empty()) {
          Instruction mvf;
          mvf.op = Opcode::kMvFixed;
          mvf.tile = p;
          mvf.chunk = chunk;
          mvf.col_begin = col_begin;
          mvf.col_end = col_end;
          for (i32 c : plan.fixed_cols)
            mvf.dense_rows.push_back(t.tile_col * T + c);
          prog.code.push_back(mvf);
        }

        // Rows currently held by each dynamic slot; meaningful only while
        // this tile's registers are live, so the sets reset per chunk.
        std::array<std::set<i32>, 2> resident;
        for (i32 s = 0; s < static_cast<i32>(t.rows.size()); ++s) {
          const SubRow& sr = t.rows[s];
          std::vector<i32> miss_rows;
          for (i32 c : sr.col_idx)
            if (!fixed.count(c)) miss_rows.push_back(t.tile_col * T + c);
          i32 cmp_slot = -1;
          if (!miss_rows.empty()) {
            if (static_cast<i32>(miss_rows.size()) > dyn_budget)
              throw CompileError(
                  "sub-row needs " + std::to_string(miss_rows.size()) +
                  " dynamic rows but only " + std::to_string(dyn_budget) +
                  " register rows remain beyond the pinned region");
            const i32 slot = (cfg.vrf_mode == VrfMode::kDouble)
                                 ? static_cast<i32>(dyn_counter % 2)
                                 : 0;
            cmp_slot = slot;
            std::vector<i32> moved = miss_rows;
            if (cfg.mv_dedup) {
              moved.clear();
              for (i32 r : miss_rows)
                if (!resident[static_cast<size_t>(slot)].count(r)) moved.push_back(r);
            }
            if (!moved.empty()) {
              Instruction mvd;
              mvd.op = Opcode::kMvDyn;
              mvd.tile = p;
              mvd.chunk = chunk;
              mvd.slot = slot;
              if (cfg.vrf_mode == VrfMode::kDouble) ++dyn_counter;
              mvd.col_begin = col_begin;
              mvd.col_end = col_end;
              mvd.dense_rows = moved;
              // Occupancy after the move: the sub-row's full dynamic working
              // set stays pinned while its CMP runs, even when some rows were
              // already in place and did not travel.
              mvd.working_rows = static_cast<i32>(miss_rows.size());
              prog.code.push_back(mvd);
              resident[static_cast<size_t>(slot)] =
                  std::set<i32>(miss_rows.begin(), miss_rows.end());
            }
          }

          Instruction cmp;
          cmp.op = Opcode::kCmp;
          cmp.tile = p;
          cmp.chunk = chunk;
          cmp.slot = cmp_slot;
          cmp.subrow = s;
          cmp.nnz = sr.nnz();
          cmp.accumulate = touched[static_cast<size_t>(sr.parent_row)] != 0;
          cmp.dest = (p == ps.back()) ? CmpDest::kResult : CmpDest::kTemp;
          cmp.col_begin = col_begin;
          cmp.col_end = col_end;
          prog.code.push_back(cmp);
          touched[static_cast<size_t>(sr.parent_row)] = 1;
        }
      }

      Instruction st;
      st.op = Opcode::kStD;
      st.row_begin = tr * T;
      st.row_end = tr * T + band_rows;
      st.col_begin = col_begin;
      st.col_end = col_end;
      st.bytes = static_cast<i64>(band_rows) * (col_end - col_begin) * eb;
      prog.code.push_back(st);
    }
  }
  return prog;
}

}  // namespace fv
