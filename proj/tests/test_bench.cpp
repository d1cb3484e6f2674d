#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "protkin/bench.hpp"
#include "protkin/lrmsd.hpp"

using namespace protkin;

namespace {

std::vector<BenchRow> synthetic(double exponent, const std::string& pass = "forward") {
  std::vector<BenchRow> rows;
  for (int len = 100; len <= 700; len += 100) {
    for (int rep = 1; rep <= 3; ++rep) {
      // One outlier replicate per length; the median ignores it.
      const double noise = rep == 3 ? 5.0 : 1.0;
      rows.push_back({"backbone", len, 32, pass, rep, 1e-9 * std::pow(len, exponent) * noise, 1});
    }
  }
  return rows;
}

}  // namespace

TEST(Random, RotationIsProper) {
  Rng rng(71);
  for (int k = 0; k < 50; ++k) {
    const auto r = random_rotation(rng);
    const double det = r[0] * (r[4] * r[8] - r[5] * r[7]) - r[1] * (r[3] * r[8] - r[5] * r[6]) +
                       r[2] * (r[3] * r[7] - r[4] * r[6]);
    EXPECT_NEAR(det, 1.0, 1e-12);
  }
  for (int k = 0; k < 1000; ++k) {
    const double a = random_angle(rng);
    EXPECT_GE(a, -kPi);
    EXPECT_LT(a, kPi);
  }
  const std::string seq = random_sequence(rng, 500);
  EXPECT_EQ(seq.size(), 500u);
  for (char c : seq) EXPECT_NE(std::string(kStandardResidues).find(c), std::string::npos);
}

TEST(Parse, NamesRoundTrip) {
  for (auto m : {GradModel::kBackbone, GradModel::kFullAtom, GradModel::kLrmsd}) {
    EXPECT_EQ(parse_grad_model(to_string(m)), m);
  }
  for (auto op : {BenchOp::kBackbone, BenchOp::kFullAtom, BenchOp::kLrmsd}) {
    EXPECT_EQ(parse_bench_op(to_string(op)), op);
  }
  EXPECT_THROW(parse_grad_model("torsion"), InputError);
  EXPECT_THROW(parse_bench_op(""), InputError);
}

TEST(Gradcheck, SmallRunsPass) {
  for (auto m : {GradModel::kBackbone, GradModel::kFullAtom, GradModel::kLrmsd}) {
    const GradcheckReport r = run_gradcheck({.model = m, .length = 6, .trials = 4, .seed = 3, .tol = 1e-4});
    EXPECT_TRUE(r.passed) << to_string(m) << " " << r.max_relative_error;
    EXPECT_EQ(r.trials_run, 4u);
    EXPECT_LT(r.max_relative_error, 1e-5);
  }
}

TEST(Gradcheck, ZeroToleranceFails) {
  const GradcheckReport r = run_gradcheck({.model = GradModel::kBackbone, .length = 4, .trials = 2, .tol = 0.0});
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(r.worst_loss.empty());
}

TEST(Gradcheck, Deterministic) {
  const GradcheckConfig cfg{.model = GradModel::kFullAtom, .length = 5, .trials = 3, .seed = 9};
  EXPECT_EQ(run_gradcheck(cfg).max_relative_error, run_gradcheck(cfg).max_relative_error);
}

TEST(Benchmark, RowCountsAndCallback) {
  const BenchConfig cfg{.op = BenchOp::kBackbone, .min_len = 10, .max_len = 30, .step = 10, .batch = 2, .reps = 2};
  std::size_t seen = 0;
  const auto rows = run_scaling_benchmark(cfg, [&](const BenchRow&) { ++seen; });
  EXPECT_EQ(rows.size(), 3u * 2 * 2);
  EXPECT_EQ(seen, rows.size());
  for (const auto& r : rows) {
    EXPECT_EQ(r.op_name, "backbone");
    EXPECT_EQ(r.batch_size, 2);
    EXPECT_TRUE(r.pass == "forward" || r.pass == "backward");
    EXPECT_GT(r.wall_time, 0.0);
  }
  EXPECT_THROW(run_scaling_benchmark({.min_len = 50, .max_len = 10}), InputError);
  EXPECT_THROW(run_scaling_benchmark({.step = 0}), InputError);
}

TEST(Benchmark, CsvRoundTrip) {
  const auto rows = synthetic(2.0);
  std::stringstream s;
  write_bench_csv(s, rows);
  EXPECT_EQ(s.str().rfind(kBenchCsvVersion, 0), 0u);
  const auto back = read_bench_csv(s);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].op_name, rows[i].op_name);
    EXPECT_EQ(back[i].sequence_length, rows[i].sequence_length);
    EXPECT_EQ(back[i].pass, rows[i].pass);
    EXPECT_EQ(back[i].replicate, rows[i].replicate);
    EXPECT_NEAR(back[i].wall_time, rows[i].wall_time, 1e-12 * rows[i].wall_time);
  }
  std::istringstream bad(std::string(kBenchCsvVersion) + "\nop,len\nbackbone,x\n");
  EXPECT_THROW(read_bench_csv(bad), ParseError);
}

TEST(ComplexityFit, RecoversSyntheticExponents) {
  EXPECT_NEAR(fit_complexity(synthetic(2.0)).slope, 2.0, 1e-9);
  EXPECT_NEAR(fit_complexity(synthetic(1.0)).slope, 1.0, 1e-9);
  auto both = synthetic(1.0);
  for (const auto& r : synthetic(2.0, "backward")) both.push_back(r);
  const auto fits = fit_complexity_groups(both);
  ASSERT_EQ(fits.size(), 2u);
  EXPECT_EQ(fits[0].pass, "forward");
  EXPECT_NEAR(fits[0].slope, 1.0, 1e-9);
  EXPECT_NEAR(fits[1].slope, 2.0, 1e-9);
  EXPECT_EQ(fits[1].lengths, 7u);
  auto two = synthetic(1.0);
  two.erase(std::remove_if(two.begin(), two.end(), [](const BenchRow& r) { return r.sequence_length > 200; }),
            two.end());
  EXPECT_THROW(fit_complexity(two), InputError);
}

TEST(Precision, SmallExperiment) {
  const PrecisionResult r = run_precision_experiment({.max_len = 50, .reps = 4, .seed = 2});
  ASSERT_EQ(r.rows.size(), 150u);
  double max_seen = 0.0;
  for (const auto& row : r.rows) {
    EXPECT_LE(row.ci95_low, row.mean_error);
    EXPECT_LE(row.mean_error, row.ci95_high);
    EXPECT_GE(row.ci95_low, 0.0);
    max_seen = std::max(max_seen, row.mean_error);
  }
  EXPECT_EQ(r.max_mean_error, max_seen);
  EXPECT_EQ(r.rows[r.max_index].mean_error, max_seen);
  // Atom 0 is at the origin in both precisions.
  EXPECT_EQ(r.rows[0].mean_error, 0.0);
  EXPECT_LT(r.max_mean_error, 1e-3);
  std::stringstream s;
  write_precision_csv(s, r.rows);
  EXPECT_EQ(s.str().rfind(kPrecisionCsvVersion, 0), 0u);
}

TEST(Precision, TrendSlope) {
  std::vector<double> rising(100), flat(100, 3.0);
  for (std::size_t i = 0; i < 100; ++i) rising[i] = 0.5 * static_cast<double>(i);
  EXPECT_NEAR(binned_trend_slope(rising), 0.5, 1e-12);
  EXPECT_NEAR(binned_trend_slope(flat), 0.0, 1e-12);
  const auto means = binned_means(rising, 4);
  ASSERT_EQ(means.size(), 4u);
  EXPECT_DOUBLE_EQ(means[0], 0.5 * 12.0);
  EXPECT_TRUE(std::is_sorted(means.begin(), means.end()));
}
