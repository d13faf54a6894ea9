#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "flexvector/config.hpp"
#include "flexvector/csr.hpp"
#include "flexvector/isa.hpp"
#include "flexvector/metrics.hpp"
#include "flexvector/topk.hpp"
#include "flexvector/types.hpp"

namespace fv {

namespace detail {

// One sub-row of multiply-accumulate, bit-exact 32-bit wraparound.  The
// accumulate flag chooses between overwriting the output block entry and
// adding to it; the first sub-row of an output row in each pass overwrites.
inline void apply_cmp(const Instruction& ins, const TilePlan& plan,
                      const DenseMatrix& dense, i32 tile_rows, DenseMatrix& out) {
  const SparseTile& t = plan.tile;
  const SubRow& sr = t.rows[static_cast<size_t>(ins.subrow)];
  const i32 parent = t.tile_row * tile_rows + sr.parent_row;
  for (i32 j = ins.col_begin; j < ins.col_end; ++j) {
    i32 acc = ins.accumulate ? out.at(parent, j) : 0;
    for (size_t z = 0; z < sr.col_idx.size(); ++z) {
      const i32 drow = t.tile_col * tile_rows + sr.col_idx[z];
      acc = wrap_mul_add(acc, sr.values[z], dense.at(drow, j));
    }
    out.at(parent, j) = acc;
  }
}

}  // namespace detail

// Runs a program for its values only: walks the compute instructions in
// order and materialises the dense result.  Timing-free, used as the
// cross-check for the cycle-level model.
inline DenseMatrix execute_functional(const Program& prog, const DenseMatrix& dense,
                                      const MachineConfig& cfg) {
  verify_program(prog, cfg.tile_rows);
  DenseMatrix out = make_dense(prog.out_rows, prog.out_cols);
  for (const Instruction& ins : prog.code) {
    if (ins.op != Opcode::kCmp) continue;
    detail::apply_cmp(ins, prog.plans[static_cast<size_t>(ins.tile)], dense,
                      cfg.tile_rows, out);
  }
  return out;
}

struct TraceEntry {
  i64 start = 0;
  i64 end = 0;
  i32 index = 0;  // position in Program::code
};

struct SimResult {
  SimReport report;
  DenseMatrix output;
  std::vector<TraceEntry> trace;
};

// Cycle-level model.  Each hardware resource (DRAM channel, index decoder,
// move port, compute lanes, control) is a FIFO serving instructions in
// program order; an instruction starts at the max of its resource-free time
// and its data dependencies, so adding buffers or register rows never slows
// a schedule down.
//
// Dependencies:
//   LD_S waits for its staging slot (round-robin over multi_buffer chunks)
//     to be drained by the chunk loaded there multi_buffer chunks earlier.
//   CAL_IDX needs the chunk's LD_S; MV_FIXED needs LD_D + CAL_IDX.
//   MV_DYN additionally waits for the register rows it overwrites: in
//     single-buffer mode that is every preceding compute; in double-buffer
//     mode only the compute consuming the same slot, plus the other slot's
//     consumer when the two staged sub-rows together overflow the shared
//     dynamic region.
//   CMP needs the chunk set-up, its own staged rows, and the output
//     accumulation tile, which alternates between two regions so a store
//     only blocks compute two passes later.
//   ST_D needs the pass's computes (lane FIFO makes the last one the max).
inline SimResult simulate(const Program& prog, const DenseMatrix& dense,
                          const MachineConfig& cfg, bool want_trace = false) {
  validate(cfg);
  verify_program(prog, cfg.tile_rows);

  SimResult res;
  res.output = make_dense(prog.out_rows, prog.out_cols);
  EventCounters& c = res.report.counters;
  c.instructions = static_cast<i64>(prog.code.size());

  i32 max_chunk = -1;
  for (const Instruction& ins : prog.code) max_chunk = std::max(max_chunk, ins.chunk);
  struct ChunkTimes {
    i64 config_end = 0, lds_end = 0, ldd_end = 0, cal_end = 0, mvf_end = 0;
    i64 completion = 0;  // latest end of any instruction of this chunk
  };
  std::vector<ChunkTimes> ct(static_cast<size_t>(max_chunk + 1));

  i64 dram_free = 0, decoder_free = 0, mv_free = 0, lanes_free = 0, ctrl_free = 0;
  i64 prev_cmp_end = 0;
  i64 slot_consumer_end[2] = {0, 0};
  i64 prev_dyn_rows = 0;
  struct PendingMv {
    i64 end = 0;
    i32 slot = 0;
  };
  std::optional<PendingMv> pending_mv;
  std::vector<i64> store_ends;  // one per completed pass

  const i64 lat = cfg.timing.dram_latency_cycles;
  const i64 bw = cfg.timing.dram_bytes_per_cycle;
  auto xfer = [&](i64 bytes) { return lat + ceil_div(bytes, bw); };

  i64 horizon = 0;
  for (i32 idx = 0; idx < static_cast<i32>(prog.code.size()); ++idx) {
    const Instruction& ins = prog.code[static_cast<size_t>(idx)];
    i64 start = 0, end = 0;
    switch (ins.op) {
      case Opcode::kConfig: {
        start = ctrl_free;
        end = start + cfg.timing.config_cycles;
        ctrl_free = end;
        ct[ins.chunk].config_end = end;
        break;
      }
      case Opcode::kLdS: {
        i64 slot_ready = 0;
        if (ins.chunk >= cfg.multi_buffer)
          slot_ready = ct[ins.chunk - cfg.multi_buffer].completion;
        start = std::max(dram_free, slot_ready);
        end = start + xfer(ins.bytes);
        dram_free = end;
        ct[ins.chunk].lds_end = end;
        c.dram_read_bits += 8 * ins.bytes;
        c.dram_accesses += 1;
        c.sram_sparse_accesses += ceil_div(ins.bytes, 4);
        break;
      }
      case Opcode::kLdD: {
        i64 slot_ready = 0;
        if (ins.chunk >= cfg.multi_buffer)
          slot_ready = ct[ins.chunk - cfg.multi_buffer].completion;
        start = std::max(dram_free, slot_ready);
        end = start + xfer(ins.bytes);
        dram_free = end;
        ct[ins.chunk].ldd_end = end;
        c.dram_read_bits += 8 * ins.bytes;
        c.dram_accesses += 1;
        c.sram_dense_accesses += ceil_div(ins.bytes * 8, cfg.vlen_bits);
        break;
      }
      case Opcode::kCalIdx: {
        start = std::max(decoder_free, ct[ins.chunk].lds_end);
        end = start + ins.nnz * cfg.timing.cal_idx_cycles_per_nnz;
        decoder_free = end;
        ct[ins.chunk].cal_end = end;
        c.sram_sparse_accesses += ins.nnz;
        break;
      }
      case Opcode::kMvFixed: {
        start = std::max({mv_free, ct[ins.chunk].ldd_end, ct[ins.chunk].cal_end,
                          ct[ins.chunk].config_end});
        const i64 rows = static_cast<i64>(ins.dense_rows.size());
        end = start + rows * cfg.timing.mv_cycles_per_row;
        mv_free = end;
        ct[ins.chunk].mvf_end = end;
        const i64 work = rows * cfg.beats(ins.col_end - ins.col_begin);
        c.sram_dense_accesses += work;
        c.vrf_writes += work;
        break;
      }
      case Opcode::kMvDyn: {
        i64 dep = std::max({mv_free, ct[ins.chunk].ldd_end, ct[ins.chunk].cal_end,
                            ct[ins.chunk].config_end});
        const i64 rows = static_cast<i64>(ins.dense_rows.size());
        // Slot occupancy after the move: with dedup some of the working set
        // was already in place, so occupancy can exceed the rows travelling.
        const i64 occupancy = ins.working_rows > 0 ? ins.working_rows : rows;
        if (cfg.vrf_mode == VrfMode::kSingle) {
          dep = std::max(dep, prev_cmp_end);
        } else {
          dep = std::max(dep, slot_consumer_end[ins.slot]);
          const i32 budget = cfg.vrf_depth - prog.plans[static_cast<size_t>(ins.tile)].k;
          if (prev_dyn_rows > 0 && prev_dyn_rows + occupancy > budget)
            dep = std::max(dep, slot_consumer_end[1 - ins.slot]);
        }
        start = dep;
        end = start + rows * cfg.timing.mv_cycles_per_row;
        mv_free = end;
        prev_dyn_rows = occupancy;
        pending_mv = PendingMv{end, ins.slot};
        const i64 work = rows * cfg.beats(ins.col_end - ins.col_begin);
        c.sram_dense_accesses += work;
        c.vrf_writes += work;
        c.vrf_miss_count += rows;
        break;
      }
      case Opcode::kCmp: {
        i64 dep = std::max({lanes_free, ct[ins.chunk].cal_end, ct[ins.chunk].mvf_end});
        if (pending_mv) dep = std::max(dep, pending_mv->end);
        if (store_ends.size() >= 2)
          dep = std::max(dep, store_ends[store_ends.size() - 2]);
        start = dep;
        const i64 beats = cfg.beats(ins.col_end - ins.col_begin);
        end = start + ins.nnz * beats + cfg.timing.writeback_cycles;
        lanes_free = end;
        prev_cmp_end = end;
        if (pending_mv) {
          slot_consumer_end[pending_mv->slot] = end;
          pending_mv.reset();
        } else if (ins.slot >= 0 && ins.slot <= 1) {
          // Dedup can elide the move while the CMP still reads the slot, so
          // the write-after-read fence must still advance.
          slot_consumer_end[ins.slot] = end;
        }
        c.mac_ops += ins.nnz * beats;
        c.vrf_reads += ins.nnz * beats;
        c.sram_sparse_accesses += ins.nnz;
        c.sram_dense_accesses += beats + (ins.accumulate ? beats : 0);
        detail::apply_cmp(ins, prog.plans[static_cast<size_t>(ins.tile)], dense,
                          cfg.tile_rows, res.output);
        break;
      }
      case Opcode::kStD: {
        start = std::max(dram_free, prev_cmp_end);
        end = start + xfer(ins.bytes);
        dram_free = end;
        store_ends.push_back(end);
        c.dram_write_bits += 8 * ins.bytes;
        c.dram_accesses += 1;
        c.sram_dense_accesses += ceil_div(ins.bytes * 8, cfg.vlen_bits);
        break;
      }
    }
    horizon = std::max(horizon, end);
    if (ins.chunk >= 0)
      ct[ins.chunk].completion = std::max(ct[ins.chunk].completion, end);
    if (want_trace) res.trace.push_back(TraceEntry{start, end, idx});
  }

  c.cycles = horizon;
  res.report.miss_kind = "vrf_miss";
  res.report.energy = energy(c, cfg.energy, cfg.dense_capacity(), cfg.sparse_buffer_bytes);
  res.report.area_um2 = area(cfg).total_um2;
  res.report.config_hash = config_hash(cfg);
  return res;
}

// Human-readable schedule dump: "start end INSTRUCTION" per line.
inline std::string format_trace(const Program& prog, const std::vector<TraceEntry>& trace) {
  std::ostringstream out;
  for (const TraceEntry& e : trace)
    out << e.start << " " << e.end << " "
        << disassemble_one(prog.code[static_cast<size_t>(e.index)]) << "\n";
  return out.str();
}

}  // namespace fv
