// protkin: build structures from dihedral angles, compare them, check
// gradients and time the passes.
//
// Exit codes: 0 success, 1 check failed, 2 usage, 3 I/O, 4 bad data.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "protkin/backbone.hpp"
#include "protkin/bench.hpp"
#include "protkin/full_atom.hpp"
#include "protkin/lrmsd.hpp"
#include "protkin/oracle.hpp"
#include "protkin/structio.hpp"

namespace fs = std::filesystem;
using namespace protkin;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3, kData = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Relative output paths land under $PROTKIN_OUTPUT_DIR when it is set.
fs::path output_path(const std::string& path) {
  fs::path p(path);
  if (const char* dir = std::getenv("PROTKIN_OUTPUT_DIR"); dir && *dir && p.is_relative()) p = fs::path(dir) / p;
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  const fs::path p = output_path(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("error writing '" + p.string() + "'");
}

struct FoldArgs {
  std::string seq;
  int seq_len = 0;
  std::uint64_t seed = 1;
  std::string angles_file;
  bool random = false;
  std::string model = "fullatom";
  std::string out;
};

int run_fold(const FoldArgs& a) {
  const bool has_seq = !a.seq.empty();
  const bool has_len = a.seq_len > 0;
  if (has_seq == has_len) throw UsageError("give exactly one of --seq or --seq-len");
  if (a.random == !a.angles_file.empty()) throw UsageError("give exactly one of --angles or --random");
  if (a.model != "backbone" && a.model != "fullatom") throw UsageError("--model must be backbone or fullatom");

  Rng rng(a.seed);
  const std::string sequence = has_seq ? a.seq : random_sequence(rng, static_cast<std::size_t>(a.seq_len));
  // Validates every residue code, also for the backbone model.
  const MoleculeGraph graph = build_graph(sequence);

  FullAtomAngles angles;
  if (a.random) {
    angles = random_full_atom_angles(rng, graph);
  } else {
    angles = read_angles(read_file(a.angles_file));
    if (a.model == "backbone") {
      if (angles.size() != sequence.size()) {
        throw InputError("angle file has " + std::to_string(angles.size()) + " residues, sequence has " +
                         std::to_string(sequence.size()));
      }
    }
  }

  AtomicCoordinates coords;
  if (a.model == "fullatom") {
    coords = fa_forward(graph, angles).coords;
  } else {
    BackboneAngles bb;
    for (const auto& r : angles) {
      bb.phi.push_back(r.phi);
      bb.psi.push_back(r.psi);
      bb.omega.push_back(r.omega);
    }
    coords = bb_forward(bb).coords;
    const TopologyLibrary& lib = default_topology();
    for (auto& atom : coords.atoms) atom.residue_code = lib.find(std::string(1, sequence[atom.residue_index]))->code3;
  }

  const std::string pdb = write_pdb(coords);
  if (a.out.empty() || a.out == "-") {
    std::cout << pdb;
    std::cerr << coords.size() << " atoms\n";
  } else {
    write_file(a.out, pdb);
    std::cout << coords.size() << " atoms\n";
  }
  return kOk;
}

struct RmsdArgs {
  std::string a, b, grad;
  bool brute_force = false;
};

int run_rmsd(const RmsdArgs& args) {
  const PdbData a = read_pdb(read_file(args.a));
  const PdbData b = read_pdb(read_file(args.b));
  const Alignment al = align(a.coords.positions, b.coords.positions);
  std::printf("%.6f\n", al.lrmsd_value);
  if (args.brute_force) std::printf("brute-force %.6f\n", brute_force_lrmsd(a.coords.positions, b.coords.positions));
  if (!args.grad.empty()) {
    const auto g = lrmsd_gradient(a.coords.positions, b.coords.positions, al);
    std::string text;
    char buf[128];
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu %.17g %.17g %.17g\n", i, g[i].x, g[i].y, g[i].z);
      text += buf;
    }
    write_file(args.grad, text);
  }
  return kOk;
}

struct GradcheckArgs {
  std::string model = "backbone";
  std::size_t len = 10;
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  double tol = 1e-4;
  double step = 1e-6;
};

int run_gradcheck_cmd(const GradcheckArgs& a) {
  GradcheckConfig cfg;
  cfg.model = parse_grad_model(a.model);
  cfg.length = a.len;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.tol = a.tol;
  cfg.fd.step = a.step;
  const GradcheckReport r = run_gradcheck(cfg);
  std::printf("model=%s len=%zu trials=%zu comparisons=%zu\n", a.model.c_str(), a.len, r.trials_run, r.comparisons);
  std::printf("max relative error %.3e (tol %.3e)\n", r.max_relative_error, a.tol);
  if (cfg.model == GradModel::kLrmsd) {
    std::printf("max |sum of gradients| %.3e, max rotational derivative %.3e\n", r.max_gradient_sum,
                r.max_rotation_derivative);
  }
  if (!r.passed) {
    std::printf("FAIL worst: seed=%llu loss=%s index=%zu analytic=%.17g numeric=%.17g\n",
                static_cast<unsigned long long>(r.worst_seed), r.worst_loss.c_str(), r.worst_index,
                r.worst_analytic, r.worst_numeric);
    return kCheckFailed;
  }
  std::printf("PASS\n");
  return kOk;
}

void print_fits(const std::vector<BenchRow>& rows) {
  for (const auto& f : fit_complexity_groups(rows)) {
    std::printf("%s %s slope=%.2f intercept=%.3f lengths=%zu\n", f.op_name.c_str(), f.pass.c_str(), f.slope,
                f.intercept, f.lengths);
  }
}

struct BenchArgs {
  std::string op = "backbone";
  BenchConfig cfg;
  std::string csv;
  bool fit = false;
};

int run_bench(BenchArgs a) {
  a.cfg.op = parse_bench_op(a.op);
  const auto rows = run_scaling_benchmark(a.cfg, [](const BenchRow& r) {
    std::fprintf(stderr, "%s L=%d %s rep %d: %.6f s\n", r.op_name.c_str(), r.sequence_length, r.pass.c_str(),
                 r.replicate, r.wall_time);
  });
  std::ostringstream csv;
  write_bench_csv(csv, rows);
  if (a.csv.empty()) {
    std::cout << csv.str();
  } else {
    write_file(a.csv, csv.str());
  }
  if (a.fit) {
    std::fflush(stdout);
    print_fits(rows);
  }
  return kOk;
}

struct PrecisionArgs {
  PrecisionConfig cfg;
  std::string csv;
  double threshold = 1e-2;
};

int run_precision(const PrecisionArgs& a) {
  const PrecisionResult r = run_precision_experiment(a.cfg);
  if (!a.csv.empty()) {
    std::ostringstream csv;
    write_precision_csv(csv, r.rows);
    write_file(a.csv, csv.str());
  }
  const PrecisionRow& last = r.rows.back();
  std::printf("atoms=%zu reps=%d\n", r.rows.size(), a.cfg.reps);
  std::printf("max mean error %.3e A at atom index %zu\n", r.max_mean_error, r.max_index);
  std::printf("last atom (index %zu) mean error %.3e A, 95%% CI [%.3e, %.3e]\n", last.atom_index, last.mean_error,
              last.ci95_low, last.ci95_high);
  std::printf("binned trend slope %.3e A/atom\n", r.trend_slope);
  std::printf("bin means");
  for (double m : r.bin_means) std::printf(" %.2e", m);
  std::printf(" (%s)\n", r.monotone ? "non-decreasing" : "not monotone");
  const bool ok = r.max_mean_error < a.threshold && r.trend_slope >= 0.0 && r.monotone;
  std::printf("%s (threshold %.1e A, non-decreasing trend)\n", ok ? "PASS" : "FAIL", a.threshold);
  return ok ? kOk : kCheckFailed;
}

int run_fit(const std::string& path) {
  std::istringstream in(read_file(path));
  print_fits(read_bench_csv(in));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"protkin: differentiable protein geometry"};
  app.require_subcommand(1);

  FoldArgs fold;
  auto* fold_cmd = app.add_subcommand("fold", "Build a structure and write it as PDB");
  fold_cmd->add_option("--seq", fold.seq, "One-letter residue codes");
  fold_cmd->add_option("--seq-len", fold.seq_len, "Length of a random sequence")->check(CLI::PositiveNumber);
  fold_cmd->add_option("--random-seed,--seed", fold.seed, "Seed for random sequences and angles");
  fold_cmd->add_option("--angles", fold.angles_file, "Angle file (radians)");
  fold_cmd->add_flag("--random", fold.random, "Use random angles");
  fold_cmd->add_option("--model", fold.model, "backbone or fullatom")->check(CLI::IsMember({"backbone", "fullatom"}));
  fold_cmd->add_option("--out", fold.out, "Output PDB path (default stdout)");

  RmsdArgs rmsd;
  auto* rmsd_cmd = app.add_subcommand("rmsd", "LRMSD between two PDB files");
  rmsd_cmd->add_option("a", rmsd.a, "First PDB file")->required();
  rmsd_cmd->add_option("b", rmsd.b, "Second PDB file")->required();
  rmsd_cmd->add_option("--grad", rmsd.grad, "Write dLRMSD/dx of the first structure to this file");
  rmsd_cmd->add_flag("--brute-force", rmsd.brute_force, "Also print the direct-search minimum");

  GradcheckArgs gc;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
  gc_cmd->add_option("--model", gc.model, "backbone, fullatom or lrmsd")
      ->check(CLI::IsMember({"backbone", "fullatom", "lrmsd"}));
  gc_cmd->add_option("--len", gc.len, "Residues per instance")->check(CLI::PositiveNumber);
  gc_cmd->add_option("--trials", gc.trials, "Number of random instances")->check(CLI::PositiveNumber);
  gc_cmd->add_option("--seed", gc.seed, "Seed of the first instance");
  gc_cmd->add_option("--tol", gc.tol, "Relative tolerance")->check(CLI::NonNegativeNumber);
  gc_cmd->add_option("--step", gc.step, "Finite-difference step")->check(CLI::PositiveNumber);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time forward and backward passes over a range of lengths");
  bench_cmd->add_option("--op", bench.op, "fullatom, backbone or lrmsd")
      ->check(CLI::IsMember({"fullatom", "backbone", "lrmsd"}));
  bench_cmd->add_option("--min-len", bench.cfg.min_len)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--max-len", bench.cfg.max_len)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--step", bench.cfg.step)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--batch", bench.cfg.batch)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--reps", bench.cfg.reps)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--threads", bench.cfg.threads)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.cfg.seed);
  bench_cmd->add_option("--csv", bench.csv, "CSV output path (default stdout)");
  bench_cmd->add_flag("--fit", bench.fit, "Print log-log slopes after the run");

  PrecisionArgs prec;
  auto* prec_cmd = app.add_subcommand("precision", "Single- vs double-precision backbone drift");
  prec_cmd->add_option("--max-len", prec.cfg.max_len)->check(CLI::PositiveNumber);
  prec_cmd->add_option("--reps", prec.cfg.reps)->check(CLI::PositiveNumber);
  prec_cmd->add_option("--seed", prec.cfg.seed);
  prec_cmd->add_option("--csv", prec.csv, "CSV output path");
  prec_cmd->add_option("--threshold", prec.threshold, "Largest acceptable mean error in A")
      ->check(CLI::PositiveNumber);

  std::string fit_csv;
  auto* fit_cmd = app.add_subcommand("fit", "Log-log slopes of a benchmark CSV");
  fit_cmd->add_option("csv", fit_csv)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*fold_cmd) return run_fold(fold);
    if (*rmsd_cmd) return run_rmsd(rmsd);
    if (*gc_cmd) return run_gradcheck_cmd(gc);
    if (*bench_cmd) return run_bench(bench);
    if (*prec_cmd) return run_precision(prec);
    if (*fit_cmd) return run_fit(fit_csv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const protkin::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
