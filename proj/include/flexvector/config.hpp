#pragma once

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "flexvector/types.hpp"

namespace fv {

enum class VrfMode { kSingle, kDouble };

inline std::string to_string(VrfMode m) {
  return m == VrfMode::kSingle ? "single" : "double";
}

inline VrfMode vrf_mode_from_string(const std::string& s) {
  if (s == "single") return VrfMode::kSingle;
  if (s == "double") return VrfMode::kDouble;
  throw ConfigError("vrf_mode must be 'single' or 'double', got '" + s + "'");
}

// Cycle-cost knobs for the timing model.  dram transfers cost
// dram_latency_cycles + ceil(bytes / dram_bytes_per_cycle) on the single
// in-order channel.
struct TimingParams {
  i64 dram_latency_cycles = 100;
  i64 dram_bytes_per_cycle = 16;
  i64 mv_cycles_per_row = 1;
  i64 writeback_cycles = 1;
  i64 config_cycles = 1;
  i64 cal_idx_cycles_per_nnz = 1;
};

// Linear energy model coefficients.  SRAM cost per access grows with the
// buffer capacity tier (bigger arrays burn more per access).
struct EnergyCoeffs {
  double dram_pj_per_bit = 7.0;
  double sram_dense_pj_per_access = 0.5;
  double sram_sparse_pj_per_access = 0.3;
  double vrf_pj_per_access = 0.1;
  double mac_pj_per_op = 0.05;
  double leakage_pj_per_cycle = 0.02;
};

// Capacity-tier multiplier applied to the base SRAM access energy.
inline double sram_tier_multiplier(i64 capacity_bytes) {
  if (capacity_bytes <= 4 * 1024) return 1.0;
  if (capacity_bytes <= 32 * 1024) return 2.0;
  if (capacity_bytes <= 256 * 1024) return 4.0;
  return 8.0;
}

// Linear area model, calibrated so the default machine comes out at
// 39.43e3 um^2 with the on-chip memories holding just under 60% of it.
struct AreaModel {
  double buffer_area_per_byte = 7.56426;
  double vrf_area_per_byte = 32.2422;
  double lane_area_per_lane = 571.735;
  double control_area_fixed = 6427.09;
  double decoder_dma_area_fixed = 7097.4;
};

// Baseline-specific knobs.  The baseline machine keeps the highest-degree
// dense rows statically resident per cluster and demand-fetches everything
// else, running ahead past stalled rows up to lookahead_depth rows.
struct GrowConfig {
  i64 dense_buffer_bytes = 0;  // 0 = same derived capacity as the main machine
  i64 sparse_buffer_bytes = 256;
  i32 multi_buffer = 6;
  i32 lookahead_depth = 16;
  i32 cluster_rows = 128;
};

struct MachineConfig {
  // Geometry
  i32 tile_rows = 16;     // tile height and width, and dense block width
  i32 element_bits = 8;   // dense element width used for traffic accounting
  i32 vlen_bits = 128;    // lane datapath width
  i32 vrf_depth = 12;     // total register rows (fixed + dynamic)
  VrfMode vrf_mode = VrfMode::kDouble;
  i32 tau = 6;            // max nonzeros per sub-row after restructuring
  i32 multi_buffer = 6;   // dense-buffer tile slots (m)

  // Capacities; dense_buffer_bytes == 0 derives m*tile + temp + result.
  i64 dense_buffer_bytes = 0;
  i64 sparse_buffer_bytes = 256;

  // Planner
  double topk_start_pct = 0.5;
  i32 fixed_k_override = -1;  // >= 0 pins every tile's reserved rows to this k
  bool mv_dedup = false;      // skip dynamic moves for rows already resident

  TimingParams timing;
  EnergyCoeffs energy;
  AreaModel area;
  GrowConfig grow;

  i32 element_bytes() const { return element_bits / 8; }
  i64 tile_bytes() const {
    return static_cast<i64>(tile_rows) * tile_rows * element_bytes();
  }
  // One loaded dense block per in-flight tile, plus staging and result tiles.
  i64 derived_dense_capacity() const {
    return static_cast<i64>(multi_buffer) * tile_bytes() + 2 * tile_bytes();
  }
  i64 dense_capacity() const {
    return dense_buffer_bytes > 0 ? dense_buffer_bytes : derived_dense_capacity();
  }
  i64 grow_dense_capacity() const {
    if (grow.dense_buffer_bytes > 0) return grow.dense_buffer_bytes;
    return static_cast<i64>(grow.multi_buffer) * tile_bytes() + 2 * tile_bytes();
  }
  i32 n_lanes() const { return vlen_bits / 32; }
  // Lane-cycles to stream one width-element dense row through the datapath.
  i64 beats(i32 width_elems) const {
    return ceil_div(static_cast<i64>(width_elems) * element_bits, vlen_bits);
  }
  i64 vrf_bytes() const {
    return static_cast<i64>(vrf_depth) * tile_rows * element_bytes();
  }
};

inline void validate(const MachineConfig& c) {
  if (c.tile_rows < 1) throw ConfigError("tile_rows must be at least 1");
  if (c.element_bits != 8 && c.element_bits != 32)
    throw ConfigError("element_bits must be 8 or 32");
  if (c.vlen_bits < 32 || c.vlen_bits % 32 != 0)
    throw ConfigError("vlen_bits must be a positive multiple of 32");
  if (c.vrf_depth < 1) throw ConfigError("vrf_depth must be at least 1");
  if (c.vrf_mode == VrfMode::kDouble && (c.vrf_depth < 2 || c.vrf_depth % 2 != 0))
    throw ConfigError("double mode needs an even vrf_depth of at least 2");
  if (c.tau < 1) throw ConfigError("tau must be at least 1");
  if (c.multi_buffer < 1) throw ConfigError("multi_buffer must be at least 1");
  if (c.dense_buffer_bytes > 0 && c.dense_buffer_bytes < c.derived_dense_capacity())
    throw ConfigError("dense_buffer_bytes " + std::to_string(c.dense_buffer_bytes) +
                      " below required " + std::to_string(c.derived_dense_capacity()));
  if (c.sparse_buffer_bytes < 1) throw ConfigError("sparse_buffer_bytes must be positive");
  if (c.topk_start_pct < 0.0 || c.topk_start_pct > 1.0)
    throw ConfigError("topk_start_pct must lie in [0,1]");
  if (c.fixed_k_override > c.vrf_depth)
    throw ConfigError("fixed_k_override exceeds vrf_depth");
  if (c.timing.dram_latency_cycles < 0 || c.timing.dram_bytes_per_cycle < 1 ||
      c.timing.mv_cycles_per_row < 0 || c.timing.writeback_cycles < 0 ||
      c.timing.config_cycles < 0 || c.timing.cal_idx_cycles_per_nnz < 0)
    throw ConfigError("timing parameters out of range");
  if (c.grow.multi_buffer < 1) throw ConfigError("grow multi_buffer must be at least 1");
  if (c.grow.lookahead_depth < 1) throw ConfigError("grow lookahead_depth must be at least 1");
  if (c.grow.cluster_rows < 1) throw ConfigError("grow cluster_rows must be at least 1");
}

// ---------------------------------------------------------------------------
// Key-value configuration file: `[section]` headers, `key = value` lines,
// `#` comments.  Unknown sections or keys are rejected by name.
// ---------------------------------------------------------------------------

namespace detail {

struct IniData {
  // section -> key -> value, plus encounter order for canonical dumps
  std::map<std::string, std::map<std::string, std::string>> kv;
};

inline std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline IniData parse_ini(std::istream& is, const std::string& origin) {
  IniData d;
  std::string line, section;
  i64 line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section");
      section = trim(t.substr(1, t.size() - 2));
      d.kv[section];
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    d.kv[section][trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return d;
}

template <typename T>
T parse_number(const std::string& v, const std::string& what) {
  std::istringstream ss(v);
  T out;
  ss >> out;
  if (ss.fail() || !(ss >> std::ws).eof())
    throw ConfigError("bad numeric value for " + what + ": '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& v, const std::string& what) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("bad boolean for " + what + ": '" + v + "'");
}

}  // namespace detail

inline MachineConfig config_from_ini(std::istream& is,
                                     const std::string& origin = "<config>") {
  const detail::IniData d = detail::parse_ini(is, origin);
  MachineConfig c;
  for (const auto& [section, keys] : d.kv) {
    for (const auto& [key, value] : keys) {
      const std::string where = origin + ": [" + section + "] " + key;
      if (section == "machine") {
        if (key == "tile_rows") c.tile_rows = detail::parse_number<i32>(value, where);
        else if (key == "element_bits") c.element_bits = detail::parse_number<i32>(value, where);
        else if (key == "vlen_bits") c.vlen_bits = detail::parse_number<i32>(value, where);
        else if (key == "vrf_depth") c.vrf_depth = detail::parse_number<i32>(value, where);
        else if (key == "vrf_mode") c.vrf_mode = vrf_mode_from_string(value);
        else if (key == "tau") c.tau = detail::parse_number<i32>(value, where);
        else if (key == "multi_buffer") c.multi_buffer = detail::parse_number<i32>(value, where);
        else if (key == "dense_buffer_bytes") c.dense_buffer_bytes = detail::parse_number<i64>(value, where);
        else if (key == "sparse_buffer_bytes") c.sparse_buffer_bytes = detail::parse_number<i64>(value, where);
        else if (key == "topk_start_pct") c.topk_start_pct = detail::parse_number<double>(value, where);
        else if (key == "fixed_k_override") c.fixed_k_override = detail::parse_number<i32>(value, where);
        else if (key == "mv_dedup") c.mv_dedup = detail::parse_bool(value, where);
        else throw ConfigError("unknown key: " + where);
      } else if (section == "timing") {
        if (key == "dram_latency_cycles") c.timing.dram_latency_cycles = detail::parse_number<i64>(value, where);
        else if (key == "dram_bytes_per_cycle") c.timing.dram_bytes_per_cycle = detail::parse_number<i64>(value, where);
        else if (key == "mv_cycles_per_row") c.timing.mv_cycles_per_row = detail::parse_number<i64>(value, where);
        else if (key == "writeback_cycles") c.timing.writeback_cycles = detail::parse_number<i64>(value, where);
        else if (key == "config_cycles") c.timing.config_cycles = detail::parse_number<i64>(value, where);
        else if (key == "cal_idx_cycles_per_nnz") c.timing.cal_idx_cycles_per_nnz = detail::parse_number<i64>(value, where);
        else throw ConfigError("unknown key: " + where);
      } else if (section == "energy") {
        if (key == "dram_pj_per_bit") c.energy.dram_pj_per_bit = detail::parse_number<double>(value, where);
        else if (key == "sram_dense_pj_per_access") c.energy.sram_dense_pj_per_access = detail::parse_number<double>(value, where);
        else if (key == "sram_sparse_pj_per_access") c.energy.sram_sparse_pj_per_access = detail::parse_number<double>(value, where);
        else if (key == "vrf_pj_per_access") c.energy.vrf_pj_per_access = detail::parse_number<double>(value, where);
        else if (key == "mac_pj_per_op") c.energy.mac_pj_per_op = detail::parse_number<double>(value, where);
        else if (key == "leakage_pj_per_cycle") c.energy.leakage_pj_per_cycle = detail::parse_number<double>(value, where);
        else throw ConfigError("unknown key: " + where);
      } else if (section == "area") {
        if (key == "buffer_area_per_byte") c.area.buffer_area_per_byte = detail::parse_number<double>(value, where);
        else if (key == "vrf_area_per_byte") c.area.vrf_area_per_byte = detail::parse_number<double>(value, where);
        else if (key == "lane_area_per_lane") c.area.lane_area_per_lane = detail::parse_number<double>(value, where);
        else if (key == "control_area_fixed") c.area.control_area_fixed = detail::parse_number<double>(value, where);
        else if (key == "decoder_dma_area_fixed") c.area.decoder_dma_area_fixed = detail::parse_number<double>(value, where);
        else throw ConfigError("unknown key: " + where);
      } else if (section == "grow") {
        if (key == "dense_buffer_bytes") c.grow.dense_buffer_bytes = detail::parse_number<i64>(value, where);
        else if (key == "sparse_buffer_bytes") c.grow.sparse_buffer_bytes = detail::parse_number<i64>(value, where);
        else if (key == "multi_buffer") c.grow.multi_buffer = detail::parse_number<i32>(value, where);
        else if (key == "lookahead_depth") c.grow.lookahead_depth = detail::parse_number<i32>(value, where);
        else if (key == "cluster_rows") c.grow.cluster_rows = detail::parse_number<i32>(value, where);
        else throw ConfigError("unknown key: " + where);
      } else {
        throw ConfigError(origin + ": unknown section [" + section + "]");
      }
    }
  }
  validate(c);
  return c;
}

inline MachineConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path);
  return config_from_ini(is, path);
}

namespace detail {

inline std::string fmt_double(double v) {
  std::ostringstream ss;
  ss.precision(10);
  ss << v;
  return ss.str();
}

}  // namespace detail

// Canonical text form: fixed section and key order, so equal configs always
// serialize to equal bytes (this is what the config hash covers).
inline std::string config_to_ini(const MachineConfig& c) {
  std::ostringstream o;
  o << "[machine]\n";
  o << "tile_rows = " << c.tile_rows << "\n";
  o << "element_bits = " << c.element_bits << "\n";
  o << "vlen_bits = " << c.vlen_bits << "\n";
  o << "vrf_depth = " << c.vrf_depth << "\n";
  o << "vrf_mode = " << to_string(c.vrf_mode) << "\n";
  o << "tau = " << c.tau << "\n";
  o << "multi_buffer = " << c.multi_buffer << "\n";
  o << "dense_buffer_bytes = " << c.dense_buffer_bytes << "\n";
  o << "sparse_buffer_bytes = " << c.sparse_buffer_bytes << "\n";
  o << "topk_start_pct = " << detail::fmt_double(c.topk_start_pct) << "\n";
  o << "fixed_k_override = " << c.fixed_k_override << "\n";
  o << "mv_dedup = " << (c.mv_dedup ? "true" : "false") << "\n";
  o << "\n[timing]\n";
  o << "dram_latency_cycles = " << c.timing.dram_latency_cycles << "\n";
  o << "dram_bytes_per_cycle = " << c.timing.dram_bytes_per_cycle << "\n";
  o << "mv_cycles_per_row = " << c.timing.mv_cycles_per_row << "\n";
  o << "writeback_cycles = " << c.timing.writeback_cycles << "\n";
  o << "config_cycles = " << c.timing.config_cycles << "\n";
  o << "cal_idx_cycles_per_nnz = " << c.timing.cal_idx_cycles_per_nnz << "\n";
  o << "\n[energy]\n";
  o << "dram_pj_per_bit = " << detail::fmt_double(c.energy.dram_pj_per_bit) << "\n";
  o << "sram_dense_pj_per_access = " << detail::fmt_double(c.energy.sram_dense_pj_per_access) << "\n";
  o << "sram_sparse_pj_per_access = " << detail::fmt_double(c.energy.sram_sparse_pj_per_access) << "\n";
  o << "vrf_pj_per_access = " << detail::fmt_double(c.energy.vrf_pj_per_access) << "\n";
  o << "mac_pj_per_op = " << detail::fmt_double(c.energy.mac_pj_per_op) << "\n";
  o << "leakage_pj_per_cycle = " << detail::fmt_double(c.energy.leakage_pj_per_cycle) << "\n";
  o << "\n[area]\n";
  o << "buffer_area_per_byte = " << detail::fmt_double(c.area.buffer_area_per_byte) << "\n";
  o << "vrf_area_per_byte = " << detail::fmt_double(c.area.vrf_area_per_byte) << "\n";
  o << "lane_area_per_lane = " << detail::fmt_double(c.area.lane_area_per_lane) << "\n";
  o << "control_area_fixed = " << detail::fmt_double(c.area.control_area_fixed) << "\n";
  o << "decoder_dma_area_fixed = " << detail::fmt_double(c.area.decoder_dma_area_fixed) << "\n";
  o << "\n[grow]\n";
  o << "dense_buffer_bytes = " << c.grow.dense_buffer_bytes << "\n";
  o << "sparse_buffer_bytes = " << c.grow.sparse_buffer_bytes << "\n";
  o << "multi_buffer = " << c.grow.multi_buffer << "\n";
  o << "lookahead_depth = " << c.grow.lookahead_depth << "\n";
  o << "cluster_rows = " << c.grow.cluster_rows << "\n";
  return o.str();
}

inline u64 fnv1a_64(const std::string& s) {
  u64 h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string config_hash(const MachineConfig& c) {
  std::ostringstream ss;
  ss << std::hex << fnv1a_64(config_to_ini(c));
  return ss.str();
}

}  // namespace fv
