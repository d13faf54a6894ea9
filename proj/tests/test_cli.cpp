// End-to-end tests that drive the command-line tool as a subprocess and
// check its files, stdout, and exit codes.  The binary path comes in via
// CLI_BIN_PATH from the build.

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "flexvector/flexvector.hpp"

namespace {

namespace fs = std::filesystem;
using namespace fv;

fs::path scratch_dir() {
  static const fs::path p = [] {
    auto d = fs::temp_directory_path() / ("fv_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return p;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = scratch_dir() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = scratch_dir() / name;
  std::ofstream os(path);
  os << text;
  os.close();
  return path.string();
}

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  static int call = 0;
  const fs::path so = scratch_dir() / ("stdout_" + std::to_string(call) + ".txt");
  const fs::path se = scratch_dir() / ("stderr_" + std::to_string(call) + ".txt");
  ++call;
  const std::string cmd = std::string(CLI_BIN_PATH) + " " + args + " > " + so.string() +
                          " 2> " + se.string();
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

// The four-row schedule golden from the machine tests, fed through the tool:
// rows 0 and 2 reference columns {0,1,2}, rows 1 and 3 reference {0,1,3}.
std::string tiny_graph_file() {
  static const std::string path = write_temp(
      "tiny.edges",
      "# four rows, two hot columns\n"
      "0 0\n0 1\n0 2\n"
      "1 0\n1 1\n1 3\n"
      "2 0\n2 1\n2 2\n"
      "3 0\n3 1\n3 3\n");
  return path;
}

std::string tiny_cfg_file() {
  static const std::string path = [] {
    MachineConfig cfg;
    cfg.tile_rows = 4;
    cfg.element_bits = 8;
    cfg.vlen_bits = 128;
    cfg.vrf_depth = 8;
    cfg.vrf_mode = VrfMode::kSingle;
    cfg.tau = 3;
    cfg.multi_buffer = 2;
    cfg.fixed_k_override = 2;
    cfg.timing.dram_latency_cycles = 10;
    cfg.timing.dram_bytes_per_cycle = 8;
    return write_temp("tiny.ini", config_to_ini(cfg));
  }();
  return path;
}

TEST(Cli, PreprocessWritesTileDumps) {
  const fs::path out = fresh_dir("pre");
  const CliResult r = run_cli("preprocess --gen-nodes 64 --gen-edges 256 --seed 5 --out " +
                              out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("tiles="), std::string::npos);
  EXPECT_NE(r.out.find("cross_tile_edges="), std::string::npos);
  const std::string tiles = slurp(out / "tiles.csv");
  const std::string ks = slurp(out / "k_per_tile.csv");
  const std::string rnz = slurp(out / "rnz_hist.csv");
  const std::string cnz = slurp(out / "cnz_hist.csv");
  EXPECT_NE(tiles.find("tile_row,tile_col,subrow,parent_row,split_seq,nnz\n"), std::string::npos);
  EXPECT_NE(ks.find("tile_row,tile_col,k,n_subrows,nnz,max_rnz\n"), std::string::npos);
  EXPECT_NE(rnz.find("rnz,count_before,count_after\n"), std::string::npos);
  EXPECT_NE(cnz.find("cnz,count\n"), std::string::npos);
  // All four dumps are stamped with the same configuration hash.
  const std::string hash = tiles.substr(0, tiles.find('\n'));
  EXPECT_EQ(ks.substr(0, ks.find('\n')), hash);
  EXPECT_EQ(rnz.substr(0, rnz.find('\n')), hash);
  EXPECT_EQ(cnz.substr(0, cnz.find('\n')), hash);
  EXPECT_EQ(hash.rfind("# config_hash=", 0), 0u);
}

TEST(Cli, PreprocessCapsRowLengthAtTau) {
  // A five-neighbor hub with tau = 3 must split into fragments of at most 3.
  const std::string graph = write_temp("hub.edges",
                                       "0 1\n0 2\n0 3\n0 4\n0 5\n"
                                       "1 0\n2 1\n3 2\n4 3\n5 4\n");
  MachineConfig cfg;
  cfg.tile_rows = 8;
  cfg.tau = 3;
  const std::string ini = write_temp("hub.ini", config_to_ini(cfg));
  const fs::path out = fresh_dir("pre_tau");
  const CliResult r =
      run_cli("preprocess --graph " + graph + " --config " + ini + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("max_rnz_before=5"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("max_rnz_after=3"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("subrows_before=6"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("subrows_after=7"), std::string::npos) << r.out;
  // Long rows vanish from the after column of the length histogram.
  const std::string rnz = slurp(out / "rnz_hist.csv");
  EXPECT_NE(rnz.find("5,1,0\n"), std::string::npos) << rnz;
}

TEST(Cli, RunReproducesTheGoldenStream) {
  const fs::path out = fresh_dir("run_golden");
  const CliResult r = run_cli("run --graph " + tiny_graph_file() + " --config " +
                              tiny_cfg_file() +
                              " --features 4 --trace --save-program --baseline grow --out " +
                              out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("oracle=ok cycles=63"), std::string::npos) << r.out;

  // The cycle schedule is the hand-derived golden from the machine tests.
  const std::string want_trace =
      "0 1 CONFIG k=2\n"
      "0 17 LD_S tile=0 bytes=56\n"
      "17 29 LD_D tile=0 cols=0:4 nrows=4 bytes=16\n"
      "17 29 CAL_IDX tile=0\n"
      "29 31 MV_FIXED tile=0 rows=[0,1]\n"
      "31 32 MV_DYN tile=0 slot=0 rows=[2]\n"
      "32 36 CMP tile=0 subrow=0 nnz=3 acc=0 dest=result\n"
      "36 37 MV_DYN tile=0 slot=0 rows=[3]\n"
      "37 41 CMP tile=0 subrow=1 nnz=3 acc=0 dest=result\n"
      "41 42 MV_DYN tile=0 slot=0 rows=[2]\n"
      "42 46 CMP tile=0 subrow=2 nnz=3 acc=0 dest=result\n"
      "46 47 MV_DYN tile=0 slot=0 rows=[3]\n"
      "47 51 CMP tile=0 subrow=3 nnz=3 acc=0 dest=result\n"
      "51 63 ST_D rows=0:4 cols=0:4 bytes=16\n";
  EXPECT_EQ(slurp(out / "trace.txt"), want_trace);

  const std::string counts = slurp(out / "opcode_counts.csv");
  const size_t nl = counts.find('\n');
  ASSERT_NE(nl, std::string::npos);
  EXPECT_EQ(counts.substr(nl + 1),
            "opcode,count\n"
            "CAL_IDX,1\n"
            "CMP,4\n"
            "CONFIG,1\n"
            "LD_D,1\n"
            "LD_S,1\n"
            "MV_DYN,4\n"
            "MV_FIXED,1\n"
            "ST_D,1\n"
            "total_coarse,14\n"
            "total_fine_grained,30\n");

  EXPECT_NE(slurp(out / "report_flexvector.csv").find("cycles,63\n"), std::string::npos);
  EXPECT_NE(slurp(out / "report_grow.csv").find("dense_row_miss,"), std::string::npos);
  const std::string cmp = slurp(out / "compare.csv");
  EXPECT_NE(cmp.find("label,cycles,speedup,dram_bits,misses,energy_pj,area_um2\n"),
            std::string::npos);
  EXPECT_NE(cmp.find("\nflexvector,63,"), std::string::npos);
  EXPECT_NE(cmp.find("\ngrow,"), std::string::npos);
  EXPECT_EQ(cmp.find("geomean_ratio"), std::string::npos);  // one non-baseline row

  const std::string prog = slurp(out / "program.bin");
  ASSERT_GE(prog.size(), 4u);
  EXPECT_EQ(prog.substr(0, 4), "FVPR");
}

TEST(Cli, RerunsAreByteIdentical) {
  const fs::path o1 = fresh_dir("rerun_a");
  const fs::path o2 = fresh_dir("rerun_b");
  const std::string args = "run --gen-nodes 128 --gen-edges 512 --seed 9 --features 16 "
                           "--baseline grow --out ";
  ASSERT_EQ(run_cli(args + o1.string()).code, 0);
  ASSERT_EQ(run_cli(args + o2.string()).code, 0);
  EXPECT_EQ(slurp(o1 / "report_flexvector.csv"), slurp(o2 / "report_flexvector.csv"));
  EXPECT_EQ(slurp(o1 / "report_grow.csv"), slurp(o2 / "report_grow.csv"));
  EXPECT_EQ(slurp(o1 / "compare.csv"), slurp(o2 / "compare.csv"));
  EXPECT_NE(slurp(o1 / "compare.csv"), "");
}

TEST(Cli, SweepSerialAndConcurrentAgree) {
  const fs::path o1 = fresh_dir("sweep_conc");
  const fs::path o2 = fresh_dir("sweep_serial");
  const std::string base = "sweep --gen-nodes 96 --gen-edges 400 --seed 3 --features 16 "
                           "--axis m --values 1,2,4 --out ";
  ASSERT_EQ(run_cli(base + o1.string()).code, 0);
  ASSERT_EQ(run_cli(base + o2.string() + " --serial").code, 0);
  const std::string sw = slurp(o1 / "sweep.csv");
  EXPECT_EQ(sw, slurp(o2 / "sweep.csv"));
  EXPECT_NE(sw.find("\nm=1,"), std::string::npos);
  EXPECT_NE(sw.find("\nm=2,"), std::string::npos);
  EXPECT_NE(sw.find("\nm=4,"), std::string::npos);
  EXPECT_NE(sw.find("\ngeomean_ratio,,"), std::string::npos);
}

TEST(Cli, AblateWritesTheFeatureLadder) {
  const fs::path out = fresh_dir("ablate");
  const CliResult r = run_cli(
      "ablate --gen-nodes 96 --gen-edges 480 --seed 7 --features 16 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(out / "ablation.csv");
  const char* labels[] = {"\nbaseline,",   "\nvector_m1,", "\nvector_m6,",
                          "\ndouble_vrf,", "\nvertex_cut,", "\nflexible_k,"};
  size_t pos = 0;
  for (const char* l : labels) {
    const size_t at = csv.find(l, pos);
    ASSERT_NE(at, std::string::npos) << l << " missing or out of order in\n" << csv;
    pos = at;
  }
}

TEST(Cli, DisasmPrintsTheProgramWithCounts) {
  const CliResult r = run_cli("disasm --graph " + tiny_graph_file() + " --config " +
                              tiny_cfg_file() + " --features 4 --counts");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("CONFIG k=2\n"), std::string::npos);
  EXPECT_NE(r.out.find("MV_FIXED tile=0 rows=[0,1]\n"), std::string::npos);
  EXPECT_NE(r.out.find("# CMP 4\n"), std::string::npos);
  EXPECT_NE(r.out.find("# total_coarse 14\n"), std::string::npos);
  EXPECT_NE(r.out.find("# total_fine_grained 30\n"), std::string::npos);
}

TEST(Cli, ExternalPartitionFlowsThroughTheRun) {
  const std::string part = write_temp("blocks.txt", "1\n0\n1\n0\n");
  MachineConfig cfg;
  cfg.tile_rows = 2;
  cfg.vrf_depth = 4;
  cfg.tau = 3;
  const std::string ini = write_temp("part.ini", config_to_ini(cfg));
  const fs::path out = fresh_dir("extpart");
  const CliResult ok = run_cli("run --graph " + tiny_graph_file() + " --config " + ini +
                               " --partition " + part + " --features 4 --out " + out.string());
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("oracle=ok"), std::string::npos);
  // Wrong number of assignments is a usage error, not a crash.
  const std::string bad = write_temp("blocks_bad.txt", "0\n1\n");
  const CliResult fail = run_cli("run --graph " + tiny_graph_file() + " --config " + ini +
                                 " --partition " + bad + " --features 4 --out " + out.string());
  EXPECT_EQ(fail.code, 2);
  EXPECT_NE(fail.err.find("error:"), std::string::npos);
}

TEST(Cli, GcnWorkloadProducesCombinedReports) {
  const fs::path out = fresh_dir("gcn");
  const CliResult r = run_cli("run --workload gcn --gen-nodes 32 --gen-edges 128 --seed 11 "
                              "--gcn-in 16 --gcn-out 8 --baseline grow --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("oracle=ok"), std::string::npos);
  EXPECT_NE(slurp(out / "report_flexvector.csv").find("label,flexvector\n"), std::string::npos);
  EXPECT_NE(slurp(out / "compare.csv").find("\ngrow,"), std::string::npos);
}

TEST(Cli, LoadsMatrixMarketAndBinaryFormats) {
  // The same pattern through two on-disk formats gives the same schedule.
  const std::string mtx = write_temp("tiny.mtx",
                                     "%%MatrixMarket matrix coordinate integer general\n"
                                     "4 4 12\n"
                                     "1 1 1\n1 2 1\n1 3 1\n"
                                     "2 1 1\n2 2 1\n2 4 1\n"
                                     "3 1 1\n3 2 1\n3 3 1\n"
                                     "4 1 1\n4 2 1\n4 4 1\n");
  const CsrMatrix a = load_edge_list(tiny_graph_file());
  const std::string bin = (scratch_dir() / "tiny.csr").string();
  save_csr_file(bin, a);
  const fs::path o1 = fresh_dir("fmt_mtx");
  const fs::path o2 = fresh_dir("fmt_bin");
  const std::string tail = " --config " + tiny_cfg_file() + " --features 4 --out ";
  ASSERT_EQ(run_cli("run --graph " + mtx + tail + o1.string()).code, 0);
  ASSERT_EQ(run_cli("run --graph " + bin + tail + o2.string()).code, 0);
  EXPECT_EQ(slurp(o1 / "report_flexvector.csv"), slurp(o2 / "report_flexvector.csv"));
  EXPECT_NE(slurp(o1 / "report_flexvector.csv").find("cycles,63\n"), std::string::npos);
}

TEST(Cli, BadUsageFailsCleanly) {
  // Missing graph source.
  const CliResult none = run_cli("run --out " + fresh_dir("bad1").string());
  EXPECT_EQ(none.code, 2);
  EXPECT_NE(none.err.find("error:"), std::string::npos);
  // Both sources at once.
  const CliResult both = run_cli("run --graph x.edges --gen-nodes 8 --out " +
                                 fresh_dir("bad2").string());
  EXPECT_EQ(both.code, 2);
  // Nonexistent file.
  const CliResult gone = run_cli("run --graph /nonexistent.edges --out " +
                                 fresh_dir("bad3").string());
  EXPECT_EQ(gone.code, 2);
  EXPECT_NE(gone.err.find("error:"), std::string::npos);
  // Unknown sweep axis is rejected after parsing.
  const CliResult axis = run_cli("sweep --gen-nodes 16 --axis bogus --values 1 --out " +
                                 fresh_dir("bad4").string());
  EXPECT_EQ(axis.code, 2);
  // Missing required sweep options fail at argument parsing.
  const CliResult noaxis = run_cli("sweep --gen-nodes 16 --out " + fresh_dir("bad5").string());
  EXPECT_NE(noaxis.code, 0);
  // Unknown subcommand.
  const CliResult sub = run_cli("frobnicate");
  EXPECT_NE(sub.code, 0);
}

}  // namespace
