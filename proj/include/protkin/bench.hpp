#pragma once

// Experiment drivers behind the command-line tool: random instance
// generation, gradient checking, timing sweeps, the single- vs
// double-precision drift experiment and power-law fits of timing data.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "protkin/backbone.hpp"
#include "protkin/full_atom.hpp"
#include "protkin/oracle.hpp"

namespace protkin {

using Rng = std::mt19937_64;

// Uniform in [-pi, pi).
double random_angle(Rng& rng);
std::string random_sequence(Rng& rng, std::size_t length);
FullAtomAngles random_full_atom_angles(Rng& rng, const MoleculeGraph& graph);
BackboneAngles random_backbone_angles(Rng& rng, std::size_t length);
// Proper rotation from a uniformly random unit quaternion, row-major.
std::array<double, 9> random_rotation(Rng& rng);
std::vector<Vec3d> apply_rigid(const std::array<double, 9>& rotation, const Vec3d& shift,
                               std::span<const Vec3d> points);

// ---- gradient checking ----

enum class GradModel { kBackbone, kFullAtom, kLrmsd };

GradModel parse_grad_model(const std::string& name);  // throws InputError
std::string to_string(GradModel model);

struct GradcheckConfig {
  GradModel model = GradModel::kBackbone;
  std::size_t length = 10;  // residues; for kLrmsd the point sets hold 3 * length atoms
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  double tol = 1e-4;
  FdConfig fd;
};

struct GradcheckReport {
  std::size_t trials_run = 0;
  std::size_t comparisons = 0;
  double max_relative_error = 0.0;
  // Worst comparison seen.
  std::uint64_t worst_seed = 0;
  std::string worst_loss;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  // LRMSD only: largest |sum_i g_i| component and largest |directional
  // derivative| along an infinitesimal rigid rotation.
  double max_gradient_sum = 0.0;
  double max_rotation_derivative = 0.0;
  bool passed = false;
};

// Trial t uses an RNG seeded with seed + t. Chain models are checked under
// three losses: sum of squared coordinates, LRMSD to a random target and a
// projection of one atom's position onto a random direction.
GradcheckReport run_gradcheck(const GradcheckConfig& cfg);

// ---- timing ----

enum class BenchOp { kFullAtom, kBackbone, kLrmsd };

BenchOp parse_bench_op(const std::string& name);  // throws InputError
std::string to_string(BenchOp op);

struct BenchRow {
  std::string op_name;
  int sequence_length = 0;
  int batch_size = 0;
  std::string pass;  // forward | backward
  int replicate = 0;  // 1-based
  double wall_time = 0.0;  // seconds
  unsigned threads = 1;
};

struct BenchConfig {
  BenchOp op = BenchOp::kBackbone;
  int min_len = 100;
  int max_len = 700;
  int step = 100;
  int batch = 32;
  int reps = 10;
  unsigned threads = 1;
  std::uint64_t seed = 1;
};

// Throws InputError for an empty or malformed length range.
std::vector<BenchRow> run_scaling_benchmark(const BenchConfig& cfg,
                                            const std::function<void(const BenchRow&)>& on_row = {});

inline constexpr const char* kBenchCsvVersion = "# protkin bench v1";
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);
// Throws ParseError on malformed rows.
std::vector<BenchRow> read_bench_csv(std::istream& in);

struct ComplexityFit {
  std::string op_name;
  std::string pass;
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t lengths = 0;
};

// Least-squares line through (log L, log median time). Throws InputError
// with fewer than three distinct lengths.
ComplexityFit fit_complexity(const std::vector<BenchRow>& rows);
// One fit per (op, pass) present in rows, in order of first appearance.
std::vector<ComplexityFit> fit_complexity_groups(const std::vector<BenchRow>& rows);

// ---- precision drift ----

struct PrecisionRow {
  std::size_t atom_index = 0;
  double mean_error = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
};

struct PrecisionConfig {
  int max_len = 700;
  int reps = 10;
  std::uint64_t seed = 1;
};

struct PrecisionResult {
  std::vector<PrecisionRow> rows;
  double max_mean_error = 0.0;
  std::size_t max_index = 0;
  double trend_slope = 0.0;  // of binned mean error against atom index
  std::vector<double> bin_means;  // ten contiguous index ranges
  bool monotone = false;  // bin means non-decreasing
};

// Compares single-precision backbone coordinates against the double-precision
// full-atom model's N, CA and C on the same random angles.
PrecisionResult run_precision_experiment(const PrecisionConfig& cfg);

inline constexpr const char* kPrecisionCsvVersion = "# protkin precision v1";
void write_precision_csv(std::ostream& out, const std::vector<PrecisionRow>& rows);

// Means of `values` split into `bins` contiguous index ranges.
std::vector<double> binned_means(std::span<const double> values, std::size_t bins = 10);

// Slope of the least-squares line through bin means of `values` split into
// `bins` contiguous index ranges.
double binned_trend_slope(std::span<const double> values, std::size_t bins = 10);

}  // namespace protkin
