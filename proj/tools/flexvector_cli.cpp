// Command-line harness: graph preprocessing dumps, single runs with an
// optional cache-centric baseline, parameter sweeps, the staged feature
// ablation, and a program pretty-printer.  Every output is a CSV (or plain
// text for traces/disassembly) fully determined by the seed and the
// configuration file.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flexvector/flexvector.hpp"

namespace {

struct CommonOpts {
  std::string graph_path;
  fv::i32 gen_nodes = 0;
  fv::i64 gen_edges = 0;
  double gen_alpha = 2.2;
  std::string config_path;
  std::string partition_path;
  std::string workload = "spmm";
  fv::i32 features = 64;
  fv::i32 gcn_in = 32;
  fv::i32 gcn_out = 16;
  fv::u64 seed = 1;
  std::string out_dir = "out";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--graph", o.graph_path,
                  "sparse operand file (.mtx, .csr binary, or edge list)");
  cmd->add_option("--gen-nodes", o.gen_nodes, "generate a power-law graph: node count");
  cmd->add_option("--gen-edges", o.gen_edges, "generated graph: target edge count");
  cmd->add_option("--gen-alpha", o.gen_alpha, "generated graph: degree exponent");
  cmd->add_option("--config", o.config_path, "machine configuration file");
  cmd->add_option("--partition", o.partition_path, "external row-block assignment file");
  cmd->add_option("--workload", o.workload, "spmm or gcn")
      ->check(CLI::IsMember({"spmm", "gcn"}));
  cmd->add_option("--features", o.features, "dense operand width for spmm");
  cmd->add_option("--gcn-in", o.gcn_in, "gcn input feature width");
  cmd->add_option("--gcn-out", o.gcn_out, "gcn output feature width");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out", o.out_dir, "output directory");
}

fv::MachineConfig load_cfg(const CommonOpts& o) {
  if (o.config_path.empty()) {
    fv::MachineConfig cfg;
    fv::validate(cfg);
    return cfg;
  }
  return fv::load_config(o.config_path);
}

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

fv::CsrMatrix load_graph(const CommonOpts& o) {
  const bool have_file = !o.graph_path.empty();
  const bool have_gen = o.gen_nodes > 0;
  if (have_file == have_gen)
    throw fv::ParamError("give exactly one graph source: --graph or --gen-nodes");
  if (have_gen) {
    const fv::i64 edges = o.gen_edges > 0 ? o.gen_edges : 4 * static_cast<fv::i64>(o.gen_nodes);
    return fv::gen_power_law(o.gen_nodes, edges, o.gen_alpha, o.seed);
  }
  if (ends_with(o.graph_path, ".mtx")) return fv::load_matrix_market(o.graph_path);
  if (ends_with(o.graph_path, ".csr") || ends_with(o.graph_path, ".bin"))
    return fv::load_csr_file(o.graph_path);
  return fv::load_edge_list(o.graph_path);
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw fv::IoError("cannot write " + p.string());
  f << content;
  std::cout << "wrote " << p.string() << "\n";
}

// ---------------------------------------------------------------------------

int cmd_preprocess(const CommonOpts& o) {
  const fv::MachineConfig cfg = load_cfg(o);
  const fv::CsrMatrix a = load_graph(o);
  std::filesystem::create_directories(o.out_dir);
  const std::string hash_line = "# config_hash=" + fv::config_hash(cfg) + "\n";

  fv::Partition part;
  if (!o.partition_path.empty())
    part = fv::load_external_partition(o.partition_path, a.n_rows, cfg.tile_rows);
  else if (a.n_rows == a.n_cols)
    part = fv::edge_cut_partition(a, cfg.tile_rows);
  else
    part = fv::identity_partition(a.n_rows, cfg.tile_rows);

  const std::vector<fv::SparseTile> raw = fv::extract_tiles(a, part);
  const std::vector<fv::SparseTile> cut = fv::vertex_cut_all(raw, cfg.tau);
  const std::vector<fv::TilePlan> plans = fv::plan_tiles(cut, cfg);

  fv::i32 max_before = 0, max_after = 0;
  std::map<fv::i32, fv::i64> rnz_before, rnz_after, cnz_hist;
  for (const fv::SparseTile& t : raw)
    for (const fv::SubRow& r : t.rows) {
      rnz_before[r.nnz()] += 1;
      max_before = std::max(max_before, r.nnz());
    }
  for (const fv::SparseTile& t : cut) {
    for (const fv::SubRow& r : t.rows) {
      rnz_after[r.nnz()] += 1;
      max_after = std::max(max_after, r.nnz());
    }
    for (fv::i32 c : fv::column_counts(t))
      if (c > 0) cnz_hist[c] += 1;
  }

  std::ostringstream tiles_csv;
  tiles_csv << hash_line << "tile_row,tile_col,subrow,parent_row,split_seq,nnz\n";
  for (size_t ti = 0; ti < cut.size(); ++ti)
    for (size_t s = 0; s < cut[ti].rows.size(); ++s) {
      const fv::SubRow& r = cut[ti].rows[s];
      tiles_csv << cut[ti].tile_row << "," << cut[ti].tile_col << "," << s << ","
                << r.parent_row << "," << r.split_seq << "," << r.nnz() << "\n";
    }
  write_file(std::filesystem::path(o.out_dir) / "tiles.csv", tiles_csv.str());

  std::ostringstream k_csv;
  k_csv << hash_line << "tile_row,tile_col,k,n_subrows,nnz,max_rnz\n";
  for (const fv::TilePlan& p : plans)
    k_csv << p.tile.tile_row << "," << p.tile.tile_col << "," << p.k << ","
          << p.tile.rows.size() << "," << p.tile.nnz() << "," << p.tile.max_rnz << "\n";
  write_file(std::filesystem::path(o.out_dir) / "k_per_tile.csv", k_csv.str());

  std::ostringstream rnz_csv;
  rnz_csv << hash_line << "rnz,count_before,count_after\n";
  std::map<fv::i32, std::pair<fv::i64, fv::i64>> merged;
  for (const auto& [v, n] : rnz_before) merged[v].first = n;
  for (const auto& [v, n] : rnz_after) merged[v].second = n;
  for (const auto& [v, p] : merged)
    rnz_csv << v << "," << p.first << "," << p.second << "\n";
  write_file(std::filesystem::path(o.out_dir) / "rnz_hist.csv", rnz_csv.str());

  std::ostringstream cnz_csv;
  cnz_csv << hash_line << "cnz,count\n";
  for (const auto& [v, n] : cnz_hist) cnz_csv << v << "," << n << "\n";
  write_file(std::filesystem::path(o.out_dir) / "cnz_hist.csv", cnz_csv.str());

  std::cout << "tiles=" << cut.size() << " subrows_before=" << [&] {
    fv::i64 n = 0;
    for (const auto& t : raw) n += static_cast<fv::i64>(t.rows.size());
    return n;
  }() << " subrows_after=" << [&] {
    fv::i64 n = 0;
    for (const auto& t : cut) n += static_cast<fv::i64>(t.rows.size());
    return n;
  }() << " max_rnz_before=" << max_before << " max_rnz_after=" << max_after;
  if (a.n_rows == a.n_cols)
    std::cout << " cross_tile_edges=" << fv::count_cross_tile_edges(a, part);
  std::cout << "\n";
  return 0;
}

int cmd_run(const CommonOpts& o, bool with_baseline, bool want_trace, bool save_prog) {
  const fv::MachineConfig cfg = load_cfg(o);
  const fv::CsrMatrix a = load_graph(o);
  std::filesystem::create_directories(o.out_dir);
  const std::filesystem::path dir(o.out_dir);

  fv::Partition ext;
  const fv::Partition* part = nullptr;
  if (!o.partition_path.empty()) {
    ext = fv::load_external_partition(o.partition_path, a.n_rows, cfg.tile_rows);
    part = &ext;
  }

  bool oracle_ok = true;
  std::vector<fv::SimReport> reports;

  if (o.workload == "spmm") {
    const fv::DenseMatrix dense = fv::make_dense_operand(a.n_cols, o.features, o.seed ^ 0xd1ce);
    fv::PipelineResult r = fv::run_flexvector(a, dense, cfg, part, want_trace);
    oracle_ok = r.oracle_ok;
    r.sim.report.label = "flexvector";
    reports.push_back(r.sim.report);
    write_file(dir / "report_flexvector.csv", fv::report_csv(r.sim.report));

    std::ostringstream oc;
    oc << "# config_hash=" << fv::config_hash(cfg) << "\n" << "opcode,count\n";
    for (const auto& [op, n] : fv::count_by_opcode(r.prog)) oc << op << "," << n << "\n";
    oc << "total_coarse," << r.prog.code.size() << "\n";
    oc << "total_fine_grained," << fv::expand_fine_grained(r.prog) << "\n";
    write_file(dir / "opcode_counts.csv", oc.str());

    if (want_trace)
      write_file(dir / "trace.txt", fv::format_trace(r.prog, r.sim.trace));
    if (save_prog) {
      std::ofstream pf(dir / "program.bin", std::ios::binary);
      fv::save_program(pf, r.prog);
      std::cout << "wrote " << (dir / "program.bin").string() << "\n";
    }
    if (with_baseline) {
      fv::GrowResult g = fv::run_grow(a, dense, cfg);
      oracle_ok = oracle_ok && g.oracle_ok;
      g.sim.report.label = "grow";
      reports.push_back(g.sim.report);
      write_file(dir / "report_grow.csv", fv::report_csv(g.sim.report));
    }
  } else {
    const fv::GcnProblem p = fv::make_gcn_problem(a, o.gcn_in, o.gcn_out, o.seed);
    fv::GcnResult r = fv::run_gcn_flexvector(p.a_hat, p.x, p.w, cfg);
    oracle_ok = r.oracle_ok;
    r.combined.label = "flexvector";
    reports.push_back(r.combined);
    write_file(dir / "report_flexvector.csv", fv::report_csv(r.combined));
    if (with_baseline) {
      fv::GcnGrowResult g = fv::run_gcn_grow(p.a_hat, p.x, p.w, cfg);
      oracle_ok = oracle_ok && g.oracle_ok;
      g.combined.label = "grow";
      reports.push_back(g.combined);
      write_file(dir / "report_grow.csv", fv::report_csv(g.combined));
    }
  }

  if (reports.size() > 1)
    write_file(dir / "compare.csv", fv::compare(reports, "grow"));

  if (!oracle_ok) {
    std::cerr << "error: simulated output diverged from the reference result\n";
    return 1;
  }
  std::cout << "oracle=ok cycles=" << reports.front().counters.cycles << "\n";
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& axis,
              const std::vector<std::string>& values, bool serial) {
  if (o.workload != "spmm")
    throw fv::ParamError("sweep supports the spmm workload");
  const fv::MachineConfig cfg = load_cfg(o);
  const fv::CsrMatrix a = load_graph(o);
  std::filesystem::create_directories(o.out_dir);
  const fv::DenseMatrix dense = fv::make_dense_operand(a.n_cols, o.features, o.seed ^ 0xd1ce);
  const std::vector<fv::SimReport> reports =
      fv::sweep(a, dense, cfg, axis, values, !serial);
  write_file(std::filesystem::path(o.out_dir) / "sweep.csv",
             fv::compare(reports, reports.front().label));
  return 0;
}

int cmd_ablate(const CommonOpts& o) {
  if (o.workload != "spmm")
    throw fv::ParamError("ablate supports the spmm workload");
  const fv::MachineConfig cfg = load_cfg(o);
  const fv::CsrMatrix a = load_graph(o);
  std::filesystem::create_directories(o.out_dir);
  const fv::DenseMatrix dense = fv::make_dense_operand(a.n_cols, o.features, o.seed ^ 0xd1ce);
  const std::vector<fv::SimReport> reports = fv::run_ablation(a, dense, cfg);
  write_file(std::filesystem::path(o.out_dir) / "ablation.csv",
             fv::compare(reports, "baseline"));
  return 0;
}

int cmd_disasm(const CommonOpts& o, bool counts) {
  const fv::MachineConfig cfg = load_cfg(o);
  const fv::CsrMatrix a = load_graph(o);
  if (o.workload != "spmm")
    throw fv::ParamError("disasm supports the spmm workload");
  const fv::DenseMatrix dense = fv::make_dense_operand(a.n_cols, o.features, o.seed ^ 0xd1ce);
  fv::Partition ext;
  const fv::Partition* part = nullptr;
  if (!o.partition_path.empty()) {
    ext = fv::load_external_partition(o.partition_path, a.n_rows, cfg.tile_rows);
    part = &ext;
  }
  const fv::PipelineResult r = fv::run_flexvector(a, dense, cfg, part);
  std::cout << fv::disassemble(r.prog);
  if (counts) {
    for (const auto& [op, n] : fv::count_by_opcode(r.prog))
      std::cout << "# " << op << " " << n << "\n";
    std::cout << "# total_coarse " << r.prog.code.size() << "\n";
    std::cout << "# total_fine_grained " << fv::expand_fine_grained(r.prog) << "\n";
  }
  if (!r.oracle_ok) {
    std::cerr << "error: simulated output diverged from the reference result\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Instruction-driven vector-machine simulator and toolchain"};
  app.require_subcommand(1);

  CommonOpts o;
  bool with_baseline = false, want_trace = false, save_prog = false;
  bool counts = false, serial = false;
  std::string axis;
  std::vector<std::string> values;
  std::string baseline_name;

  CLI::App* pre = app.add_subcommand("preprocess", "partition, restructure, and plan tiles");
  add_common(pre, o);

  CLI::App* run = app.add_subcommand("run", "simulate one workload");
  add_common(run, o);
  run->add_option("--baseline", baseline_name, "also run the cache-centric baseline (grow)")
      ->check(CLI::IsMember({"grow"}));
  run->add_flag("--trace", want_trace, "write the cycle schedule");
  run->add_flag("--save-program", save_prog, "write the compiled program binary");

  CLI::App* sw = app.add_subcommand("sweep", "simulate across one parameter axis");
  add_common(sw, o);
  sw->add_option("--axis", axis, "m, vlen, vrf_depth, tau, mode, or fixed_k")->required();
  sw->add_option("--values", values, "comma-separated axis values")
      ->required()
      ->delimiter(',');
  sw->add_flag("--serial", serial, "run points one at a time");

  CLI::App* ab = app.add_subcommand("ablate", "staged feature comparison vs baseline");
  add_common(ab, o);

  CLI::App* dis = app.add_subcommand("disasm", "print the compiled program");
  add_common(dis, o);
  dis->add_flag("--counts", counts, "append per-opcode totals");

  CLI11_PARSE(app, argc, argv);
  with_baseline = !baseline_name.empty();

  try {
    if (pre->parsed()) return cmd_preprocess(o);
    if (run->parsed()) return cmd_run(o, with_baseline, want_trace, save_prog);
    if (sw->parsed()) return cmd_sweep(o, axis, values, serial);
    if (ab->parsed()) return cmd_ablate(o);
    if (dis->parsed()) return cmd_disasm(o, counts);
  } catch (const fv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
