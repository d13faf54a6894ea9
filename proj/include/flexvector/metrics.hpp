#pragma once

#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "flexvector/config.hpp"
#include "flexvector/types.hpp"

namespace fv {

// Everything the timing model counts while a program runs.  Bit counters feed
// the energy model; the access/op counters are per-event, not per-byte.
struct EventCounters {
  i64 cycles = 0;
  i64 dram_read_bits = 0;
  i64 dram_write_bits = 0;
  i64 dram_accesses = 0;        // burst transactions on the channel
  i64 sram_dense_accesses = 0;
  i64 sram_sparse_accesses = 0;
  i64 vrf_reads = 0;
  i64 vrf_writes = 0;
  i64 vrf_miss_count = 0;       // rows staged dynamically (buffer misses for the baseline)
  i64 mac_ops = 0;
  i64 instructions = 0;
};

struct EnergyBreakdown {
  double dram_pj = 0;
  double sram_dense_pj = 0;
  double sram_sparse_pj = 0;
  double vrf_pj = 0;
  double mac_pj = 0;
  double leakage_pj = 0;
  double total_pj = 0;
};

// Strictly linear in the counters: zero counters give zero energy, and a
// counter vector with only DRAM traffic costs exactly bits * dram_pj_per_bit.
inline EnergyBreakdown energy(const EventCounters& c, const EnergyCoeffs& e,
                              i64 dense_capacity_bytes, i64 sparse_capacity_bytes) {
  EnergyBreakdown b;
  b.dram_pj = static_cast<double>(c.dram_read_bits + c.dram_write_bits) * e.dram_pj_per_bit;
  b.sram_dense_pj = static_cast<double>(c.sram_dense_accesses) *
                    e.sram_dense_pj_per_access * sram_tier_multiplier(dense_capacity_bytes);
  b.sram_sparse_pj = static_cast<double>(c.sram_sparse_accesses) *
                     e.sram_sparse_pj_per_access * sram_tier_multiplier(sparse_capacity_bytes);
  b.vrf_pj = static_cast<double>(c.vrf_reads + c.vrf_writes) * e.vrf_pj_per_access;
  b.mac_pj = static_cast<double>(c.mac_ops) * e.mac_pj_per_op;
  b.leakage_pj = static_cast<double>(c.cycles) * e.leakage_pj_per_cycle;
  b.total_pj = b.dram_pj + b.sram_dense_pj + b.sram_sparse_pj + b.vrf_pj + b.mac_pj + b.leakage_pj;
  return b;
}

struct AreaBreakdown {
  double buffers_um2 = 0;
  double vrf_um2 = 0;
  double lanes_um2 = 0;
  double control_um2 = 0;
  double decoder_dma_um2 = 0;
  double total_um2 = 0;
  double memory_share = 0;  // (buffers + vrf) / total
};

inline AreaBreakdown area(const MachineConfig& cfg) {
  AreaBreakdown a;
  a.buffers_um2 = cfg.area.buffer_area_per_byte *
                  static_cast<double>(cfg.dense_capacity() + cfg.sparse_buffer_bytes);
  a.vrf_um2 = cfg.area.vrf_area_per_byte * static_cast<double>(cfg.vrf_bytes());
  a.lanes_um2 = cfg.area.lane_area_per_lane * cfg.n_lanes();
  a.control_um2 = cfg.area.control_area_fixed;
  a.decoder_dma_um2 = cfg.area.decoder_dma_area_fixed;
  a.total_um2 = a.buffers_um2 + a.vrf_um2 + a.lanes_um2 + a.control_um2 + a.decoder_dma_um2;
  a.memory_share = (a.buffers_um2 + a.vrf_um2) / a.total_um2;
  return a;
}

// The baseline machine spends its silicon on plain buffers: same lanes and
// front-end, no vector register file.
inline AreaBreakdown area_grow(const MachineConfig& cfg) {
  AreaBreakdown a;
  a.buffers_um2 = cfg.area.buffer_area_per_byte *
                  static_cast<double>(cfg.grow_dense_capacity() + cfg.grow.sparse_buffer_bytes);
  a.vrf_um2 = 0;
  a.lanes_um2 = cfg.area.lane_area_per_lane * cfg.n_lanes();
  a.control_um2 = cfg.area.control_area_fixed;
  a.decoder_dma_um2 = cfg.area.decoder_dma_area_fixed;
  a.total_um2 = a.buffers_um2 + a.lanes_um2 + a.control_um2 + a.decoder_dma_um2;
  a.memory_share = a.buffers_um2 / a.total_um2;
  return a;
}

struct SimReport {
  std::string label;
  std::string miss_kind = "vrf_miss";  // what vrf_miss_count counted
  EventCounters counters;
  EnergyBreakdown energy;
  double area_um2 = 0;
  std::string config_hash;
};

inline double geomean(const std::vector<double>& xs) {
  if (xs.empty()) throw ParamError("geomean of empty set");
  double acc = 0;
  for (double x : xs) {
    if (x <= 0) throw ParamError("geomean needs positive values");
    acc += std::log(x);
  }
  return std::exp(acc / static_cast<double>(xs.size()));
}

namespace detail {

inline std::string fmt_metric(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(6) << v;
  return ss.str();
}

}  // namespace detail

// Comparison table against one labeled baseline.  Rows keep raw metric
// values; speedup is baseline cycles over row cycles.  With several
// non-baseline rows a trailing row carries the geometric mean of each
// metric's ratio to the baseline.
inline std::string compare(const std::vector<SimReport>& reports,
                           const std::string& baseline_label) {
  const SimReport* base = nullptr;
  for (const SimReport& r : reports)
    if (r.label == baseline_label) base = &r;
  if (!base) throw ParamError("compare: baseline label '" + baseline_label + "' not found");

  std::ostringstream out;
  out << "# config_hash=" << base->config_hash << "\n";
  out << "label,cycles,speedup,dram_bits,misses,energy_pj,area_um2\n";
  struct Ratios {
    double speedup, dram, miss, energy, area;
  };
  std::vector<Ratios> ratios;
  for (const SimReport& r : reports) {
    const double speedup = static_cast<double>(base->counters.cycles) /
                           static_cast<double>(std::max<i64>(r.counters.cycles, 1));
    out << r.label << "," << r.counters.cycles << "," << detail::fmt_metric(speedup) << ","
        << (r.counters.dram_read_bits + r.counters.dram_write_bits) << ","
        << r.counters.vrf_miss_count << "," << detail::fmt_metric(r.energy.total_pj) << ","
        << detail::fmt_metric(r.area_um2) << "\n";
    if (r.label != baseline_label) {
      auto ratio = [](double num, double den) { return den == 0 ? 1.0 : num / den; };
      ratios.push_back(Ratios{
          speedup,
          ratio(static_cast<double>(r.counters.dram_read_bits + r.counters.dram_write_bits),
                static_cast<double>(base->counters.dram_read_bits + base->counters.dram_write_bits)),
          ratio(static_cast<double>(r.counters.vrf_miss_count),
                static_cast<double>(base->counters.vrf_miss_count)),
          ratio(r.energy.total_pj, base->energy.total_pj),
          ratio(r.area_um2, base->area_um2)});
    }
  }
  if (ratios.size() >= 2) {
    auto col = [&](auto proj) {
      std::vector<double> v;
      for (const Ratios& r : ratios) v.push_back(std::max(proj(r), 1e-12));
      return geomean(v);
    };
    out << "geomean_ratio,," << detail::fmt_metric(col([](const Ratios& r) { return r.speedup; }))
        << "," << detail::fmt_metric(col([](const Ratios& r) { return r.dram; })) << ","
        << detail::fmt_metric(col([](const Ratios& r) { return r.miss; })) << ","
        << detail::fmt_metric(col([](const Ratios& r) { return r.energy; })) << ","
        << detail::fmt_metric(col([](const Ratios& r) { return r.area; })) << "\n";
  }
  return out.str();
}

// Full single-run dump: every counter and energy component, one per line.
inline std::string report_csv(const SimReport& r) {
  std::ostringstream out;
  out << "# config_hash=" << r.config_hash << "\n";
  out << "metric,value\n";
  out << "label," << r.label << "\n";
  out << "cycles," << r.counters.cycles << "\n";
  out << "instructions," << r.counters.instructions << "\n";
  out << "dram_read_bits," << r.counters.dram_read_bits << "\n";
  out << "dram_write_bits," << r.counters.dram_write_bits << "\n";
  out << "dram_accesses," << r.counters.dram_accesses << "\n";
  out << "sram_dense_accesses," << r.counters.sram_dense_accesses << "\n";
  out << "sram_sparse_accesses," << r.counters.sram_sparse_accesses << "\n";
  out << "vrf_reads," << r.counters.vrf_reads << "\n";
  out << "vrf_writes," << r.counters.vrf_writes << "\n";
  out << r.miss_kind << "," << r.counters.vrf_miss_count << "\n";
  out << "mac_ops," << r.counters.mac_ops << "\n";
  out << "energy_dram_pj," << detail::fmt_metric(r.energy.dram_pj) << "\n";
  out << "energy_sram_dense_pj," << detail::fmt_metric(r.energy.sram_dense_pj) << "\n";
  out << "energy_sram_sparse_pj," << detail::fmt_metric(r.energy.sram_sparse_pj) << "\n";
  out << "energy_vrf_pj," << detail::fmt_metric(r.energy.vrf_pj) << "\n";
  out << "energy_mac_pj," << detail::fmt_metric(r.energy.mac_pj) << "\n";
  out << "energy_leakage_pj," << detail::fmt_metric(r.energy.leakage_pj) << "\n";
  out << "energy_total_pj," << detail::fmt_metric(r.energy.total_pj) << "\n";
  out << "area_um2," << detail::fmt_metric(r.area_um2) << "\n";
  return out.str();
}

}  // namespace fv
