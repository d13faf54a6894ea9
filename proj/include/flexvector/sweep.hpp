#pragma once

#include <future>
#include <string>
#include <vector>

#include "flexvector/config.hpp"
#include "flexvector/csr.hpp"
#include "flexvector/metrics.hpp"
#include "flexvector/pipeline.hpp"
#include "flexvector/types.hpp"

namespace fv {

namespace detail {

inline i32 sweep_int(const std::string& s, const std::string& axis) {
  try {
    size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<i32>(v);
  } catch (const std::exception&) {
    throw ParamError("sweep axis '" + axis + "': bad value '" + s + "'");
  }
}

}  // namespace detail

// One configuration per sweep value.  The datapath-width axis ties the tile
// size to the number of elements one vector register holds, so wider
// machines work on proportionally larger tiles; axes that change
// preprocessing (tau, vlen) take effect because every run re-preprocesses.
inline MachineConfig apply_sweep_value(MachineConfig c, const std::string& axis,
                                       const std::string& value) {
  if (axis == "m") {
    c.multi_buffer = detail::sweep_int(value, axis);
  } else if (axis == "vlen") {
    c.vlen_bits = detail::sweep_int(value, axis);
    c.tile_rows = std::max(1, c.vlen_bits / c.element_bits);
  } else if (axis == "vrf_depth") {
    c.vrf_depth = detail::sweep_int(value, axis);
  } else if (axis == "tau") {
    c.tau = detail::sweep_int(value, axis);
  } else if (axis == "mode") {
    c.vrf_mode = vrf_mode_from_string(value);
  } else if (axis == "fixed_k") {
    c.fixed_k_override = (value == "dynamic") ? -1 : detail::sweep_int(value, axis);
  } else {
    throw ParamError("unknown sweep axis '" + axis +
                     "' (m, vlen, vrf_depth, tau, mode, fixed_k)");
  }
  validate(c);
  return c;
}

// Runs the full pipeline once per value and reports in input order.  Points
// are independent simulations, so they may run concurrently; the collected
// order (and therefore any CSV built from it) never depends on completion
// order.  Each point re-checks the functional result against the reference.
inline std::vector<SimReport> sweep(const CsrMatrix& a, const DenseMatrix& dense,
                                    const MachineConfig& base, const std::string& axis,
                                    const std::vector<std::string>& values,
                                    bool concurrent = true) {
  if (values.empty()) throw ParamError("sweep needs at least one value");
  std::vector<MachineConfig> cfgs;
  std::vector<std::string> labels;
  for (const std::string& v : values) {
    cfgs.push_back(apply_sweep_value(base, axis, v));
    labels.push_back(axis + "=" + v);
  }
  auto point = [&](size_t i) -> SimReport {
    const PipelineResult r = run_flexvector(a, dense, cfgs[i]);
    if (!r.oracle_ok)
      throw Error("sweep point " + labels[i] + " diverged from the reference result");
    SimReport rep = r.sim.report;
    rep.label = labels[i];
    return rep;
  };
  std::vector<SimReport> out(values.size());
  if (concurrent) {
    std::vector<std::future<SimReport>> fut;
    fut.reserve(values.size());
    for (size_t i = 0; i < values.size(); ++i)
      fut.push_back(std::async(std::launch::async, point, i));
    for (size_t i = 0; i < values.size(); ++i) out[i] = fut[i].get();
  } else {
    for (size_t i = 0; i < values.size(); ++i) out[i] = point(i);
  }
  return out;
}

}  // namespace fv
