#pragma once

#include <array>
#include <cstring>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "flexvector/csr.hpp"
#include "flexvector/topk.hpp"
#include "flexvector/types.hpp"

namespace fv {

// Coarse-grained instruction set.  One CMP covers a whole sub-row; one MV_DYN
// stages every not-resident dense row that sub-row needs.
enum class Opcode : u32 {
  kConfig = 0,  // set the fixed-region size for the upcoming tile
  kLdS,         // stream a sparse tile from DRAM into the sparse buffer
  kLdD,         // burst the tile's referenced dense rows into a buffer slot
  kCalIdx,      // resolve nonzero columns to buffer/register addresses
  kMvFixed,     // move the resident (fixed-region) rows into the registers
  kMvDyn,       // move one sub-row's missing rows into a dynamic slot
  kCmp,         // multiply-accumulate one sub-row against the registers
  kStD,         // store a finished output tile to DRAM
};

inline const char* opcode_name(Opcode op) {
  static constexpr std::array<const char*, 8> names = {
      "CONFIG", "LD_S", "LD_D", "CAL_IDX", "MV_FIXED", "MV_DYN", "CMP", "ST_D"};
  return names[static_cast<u32>(op)];
}

enum class CmpDest : u32 { kTemp = 0, kResult = 1 };

struct Instruction {
  Opcode op = Opcode::kConfig;
  i32 tile = -1;       // plan index (all tile-scoped ops)
  i32 chunk = -1;      // sequential in-flight-load group, for slot recycling
  i32 k = 0;           // CONFIG
  i64 bytes = 0;       // LD_S / LD_D / ST_D
  std::vector<i32> dense_rows;  // MV_FIXED / MV_DYN / LD_D machine row ids
  i32 slot = 0;        // MV_DYN target (0/1)
  i32 working_rows = 0;  // MV_DYN: slot occupancy after the move (= moved rows
                         // unless dedup skipped some already-resident ones)
  i32 subrow = -1;     // CMP: index into the tile's sub-row list
  i32 nnz = 0;         // CMP: nonzeros covered
  bool accumulate = false;      // CMP: add into the live output row
  CmpDest dest = CmpDest::kResult;
  i32 col_begin = 0, col_end = 0;  // LD_D / CMP / ST_D dense column window
  i32 row_begin = 0, row_end = 0;  // ST_D output row window
};

struct Program {
  std::vector<Instruction> code;
  std::vector<TilePlan> plans;  // directory: Instruction::tile indexes this
  i32 out_rows = 0;
  i32 out_cols = 0;
};

inline std::map<std::string, i64> count_by_opcode(const Program& p) {
  std::map<std::string, i64> counts;
  for (const Instruction& ins : p.code) ++counts[opcode_name(ins.op)];
  return counts;
}

// Instruction count of the equivalent fine-grained (per-nonzero) program:
// each CMP over z nonzeros becomes z (row-move, multiply-accumulate) pairs,
// which also replace the bulk dynamic moves; every other opcode carries over
// one-to-one.
inline i64 expand_fine_grained(const Program& p) {
  i64 count = 0;
  for (const Instruction& ins : p.code) {
    switch (ins.op) {
      case Opcode::kCmp:
        count += 2 * static_cast<i64>(ins.nnz);
        break;
      case Opcode::kMvDyn:
        break;  // absorbed into the per-nonzero pairs
      default:
        ++count;
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Disassembly: one instruction per line, `OPCODE arg=value ...`.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string row_list(const std::vector<i32>& rows) {
  std::ostringstream ss;
  ss << "[";
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i) ss << ",";
    ss << rows[i];
  }
  ss << "]";
  return ss.str();
}

}  // namespace detail

inline std::string disassemble_one(const Instruction& ins) {
  std::ostringstream ss;
  ss << opcode_name(ins.op);
  switch (ins.op) {
    case Opcode::kConfig:
      ss << " k=" << ins.k;
      break;
    case Opcode::kLdS:
      ss << " tile=" << ins.tile << " bytes=" << ins.bytes;
      break;
    case Opcode::kLdD:
      ss << " tile=" << ins.tile << " cols=" << ins.col_begin << ":" << ins.col_end
         << " nrows=" << ins.dense_rows.size() << " bytes=" << ins.bytes;
      break;
    case Opcode::kCalIdx:
      ss << " tile=" << ins.tile;
      break;
    case Opcode::kMvFixed:
      ss << " tile=" << ins.tile << " rows=" << detail::row_list(ins.dense_rows);
      break;
    case Opcode::kMvDyn:
      ss << " tile=" << ins.tile << " slot=" << ins.slot
         << " rows=" << detail::row_list(ins.dense_rows);
      break;
    case Opcode::kCmp:
      ss << " tile=" << ins.tile << " subrow=" << ins.subrow << " nnz=" << ins.nnz
         << " acc=" << (ins.accumulate ? 1 : 0)
         << " dest=" << (ins.dest == CmpDest::kTemp ? "temp" : "result");
      break;
    case Opcode::kStD:
      ss << " rows=" << ins.row_begin << ":" << ins.row_end
         << " cols=" << ins.col_begin << ":" << ins.col_end << " bytes=" << ins.bytes;
      break;
  }
  return ss.str();
}

inline std::string disassemble(const Program& p) {
  std::ostringstream ss;
  for (const Instruction& ins : p.code) ss << disassemble_one(ins) << "\n";
  return ss.str();
}

// ---------------------------------------------------------------------------
// Versioned little-endian binary form of the instruction stream.
//
//   bytes 0..3  magic "FVPR"
//   bytes 4..7  version (u32, currently 1)
//   bytes 8..15 instruction count (i64)
//   then per instruction: fixed scalar fields followed by the row-id list.
// ---------------------------------------------------------------------------

inline void save_program(std::ostream& os, const Program& p) {
  os.write("FVPR", 4);
  detail::write_pod<u32>(os, 1);
  detail::write_pod<i64>(os, static_cast<i64>(p.code.size()));
  detail::write_pod<i32>(os, p.out_rows);
  detail::write_pod<i32>(os, p.out_cols);
  for (const Instruction& ins : p.code) {
    detail::write_pod<u32>(os, static_cast<u32>(ins.op));
    detail::write_pod<i32>(os, ins.tile);
    detail::write_pod<i32>(os, ins.chunk);
    detail::write_pod<i32>(os, ins.k);
    detail::write_pod<i64>(os, ins.bytes);
    detail::write_pod<i32>(os, ins.slot);
    detail::write_pod<i32>(os, ins.working_rows);
    detail::write_pod<i32>(os, ins.subrow);
    detail::write_pod<i32>(os, ins.nnz);
    detail::write_pod<u32>(os, ins.accumulate ? 1u : 0u);
    detail::write_pod<u32>(os, static_cast<u32>(ins.dest));
    detail::write_pod<i32>(os, ins.col_begin);
    detail::write_pod<i32>(os, ins.col_end);
    detail::write_pod<i32>(os, ins.row_begin);
    detail::write_pod<i32>(os, ins.row_end);
    detail::write_pod<i64>(os, static_cast<i64>(ins.dense_rows.size()));
    for (i32 r : ins.dense_rows) detail::write_pod<i32>(os, r);
  }
}

// Loads the instruction stream (the tile directory is a compile-time object
// and is not serialized; a loaded program supports inspection/disassembly).
inline Program load_program(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "FVPR", 4) != 0)
    throw ParseError("program binary: bad magic");
  const u32 version = detail::read_pod<u32>(is, "version");
  if (version != 1)
    throw ParseError("program binary: unsupported version " + std::to_string(version));
  Program p;
  const i64 count = detail::read_pod<i64>(is, "count");
  if (count < 0) throw ParseError("program binary: negative count");
  p.out_rows = detail::read_pod<i32>(is, "out_rows");
  p.out_cols = detail::read_pod<i32>(is, "out_cols");
  p.code.resize(count);
  for (Instruction& ins : p.code) {
    const u32 op = detail::read_pod<u32>(is, "opcode");
    if (op > static_cast<u32>(Opcode::kStD))
      throw ParseError("program binary: bad opcode " + std::to_string(op));
    ins.op = static_cast<Opcode>(op);
    ins.tile = detail::read_pod<i32>(is, "tile");
    ins.chunk = detail::read_pod<i32>(is, "chunk");
    ins.k = detail::read_pod<i32>(is, "k");
    ins.bytes = detail::read_pod<i64>(is, "bytes");
    ins.slot = detail::read_pod<i32>(is, "slot");
    ins.working_rows = detail::read_pod<i32>(is, "working_rows");
    ins.subrow = detail::read_pod<i32>(is, "subrow");
    ins.nnz = detail::read_pod<i32>(is, "nnz");
    ins.accumulate = detail::read_pod<u32>(is, "accumulate") != 0;
    const u32 dest = detail::read_pod<u32>(is, "dest");
    if (dest > 1) throw ParseError("program binary: bad dest");
    ins.dest = static_cast<CmpDest>(dest);
    ins.col_begin = detail::read_pod<i32>(is, "col_begin");
    ins.col_end = detail::read_pod<i32>(is, "col_end");
    ins.row_begin = detail::read_pod<i32>(is, "row_begin");
    ins.row_end = detail::read_pod<i32>(is, "row_end");
    const i64 nrows = detail::read_pod<i64>(is, "row count");
    if (nrows < 0) throw ParseError("program binary: negative row list");
    ins.dense_rows.resize(nrows);
    for (i32& r : ins.dense_rows) r = detail::read_pod<i32>(is, "dense row");
  }
  return p;
}

// ---------------------------------------------------------------------------
// Dataflow legality: walks the stream and checks that every CMP only touches
// dense rows that were made resident for it — by the tile's MV_FIXED or by
// the sub-row's own MV_DYN — and that the per-tile setup ops ran first.
// ---------------------------------------------------------------------------

inline void verify_program(const Program& p, i32 tile_rows) {
  struct TileState {
    bool lds = false, ldd = false, calidx = false, mvfixed = false;
    std::set<i32> fixed_rows;
  };
  std::map<i32, TileState> st;
  // Dynamic-slot contents accumulate across a tile's moves (covers both the
  // full-restage and the dedup emission styles), and reset when the slot is
  // claimed by a different tile.
  std::array<std::set<i32>, 2> slot_rows;
  std::array<i32, 2> slot_tile = {-1, -1};
  i32 last_config_k = -1;

  auto need_tile = [&](const Instruction& ins) -> TileState& {
    if (ins.tile < 0 || ins.tile >= static_cast<i32>(p.plans.size()))
      throw CompileError("program references missing tile " + std::to_string(ins.tile));
    return st[ins.tile];
  };

  for (size_t i = 0; i < p.code.size(); ++i) {
    const Instruction& ins = p.code[i];
    switch (ins.op) {
      case Opcode::kConfig:
        last_config_k = ins.k;
        break;
      case Opcode::kLdS:
        need_tile(ins).lds = true;
        break;
      case Opcode::kLdD: {
        TileState& t = need_tile(ins);
        if (!t.lds) throw CompileError("LD_D before LD_S for tile " + std::to_string(ins.tile));
        t.ldd = true;
        break;
      }
      case Opcode::kCalIdx: {
        TileState& t = need_tile(ins);
        if (!t.lds) throw CompileError("CAL_IDX before LD_S for tile " + std::to_string(ins.tile));
        t.calidx = true;
        break;
      }
      case Opcode::kMvFixed: {
        TileState& t = need_tile(ins);
        if (!t.ldd || !t.calidx)
          throw CompileError("MV_FIXED before LD_D/CAL_IDX for tile " + std::to_string(ins.tile));
        if (static_cast<i32>(ins.dense_rows.size()) > last_config_k)
          throw CompileError("MV_FIXED moves more rows than CONFIG reserved");
        t.mvfixed = true;
        t.fixed_rows.insert(ins.dense_rows.begin(), ins.dense_rows.end());
        break;
      }
      case Opcode::kMvDyn: {
        TileState& t = need_tile(ins);
        if (!t.ldd || !t.calidx)
          throw CompileError("MV_DYN before LD_D/CAL_IDX for tile " + std::to_string(ins.tile));
        if (ins.slot < 0 || ins.slot > 1) throw CompileError("MV_DYN bad slot");
        if (slot_tile[ins.slot] != ins.tile) {
          slot_rows[ins.slot].clear();
          slot_tile[ins.slot] = ins.tile;
        }
        slot_rows[ins.slot].insert(ins.dense_rows.begin(), ins.dense_rows.end());
        break;
      }
      case Opcode::kCmp: {
        TileState& t = need_tile(ins);
        if (!t.ldd || !t.calidx)
          throw CompileError("CMP before LD_D/CAL_IDX for tile " + std::to_string(ins.tile));
        const TilePlan& plan = p.plans[ins.tile];
        if (!plan.fixed_cols.empty() && !t.mvfixed)
          throw CompileError("CMP before MV_FIXED for tile " + std::to_string(ins.tile));
        if (ins.subrow < 0 || ins.subrow >= static_cast<i32>(plan.tile.rows.size()))
          throw CompileError("CMP references missing sub-row");
        const SubRow& sr = plan.tile.rows[ins.subrow];
        if (ins.nnz != sr.nnz()) throw CompileError("CMP nnz does not match its sub-row");
        for (i32 c : sr.col_idx) {
          const i32 row_id = plan.tile.tile_col * tile_rows + c;
          const bool resident =
              t.fixed_rows.count(row_id) ||
              (slot_tile[0] == ins.tile && slot_rows[0].count(row_id)) ||
              (slot_tile[1] == ins.tile && slot_rows[1].count(row_id));
          if (!resident)
            throw CompileError("CMP needs dense row " + std::to_string(row_id) +
                               " which no move staged (tile " + std::to_string(ins.tile) + ")");
        }
        break;
      }
      case Opcode::kStD:
        if (ins.row_begin < 0 || ins.row_end > p.out_rows || ins.col_end > p.out_cols ||
            ins.row_begin >= ins.row_end || ins.col_begin >= ins.col_end)
          throw CompileError("ST_D window out of bounds");
        break;
    }
  }
}

}  // namespace fv
