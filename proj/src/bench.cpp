#include "protkin/bench.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "protkin/errors.hpp"
#include "protkin/lrmsd.hpp"
#include "protkin/parallel.hpp"

namespace protkin {

double random_angle(Rng& rng) { return std::uniform_real_distribution<double>(-kPi, kPi)(rng); }

std::string random_sequence(Rng& rng, std::size_t length) {
  const std::string_view codes = kStandardResidues;
  std::uniform_int_distribution<std::size_t> pick(0, codes.size() - 1);
  std::string s(length, 'A');
  for (auto& c : s) c = codes[pick(rng)];
  return s;
}

FullAtomAngles random_full_atom_angles(Rng& rng, const MoleculeGraph& graph) {
  FullAtomAngles out = default_angles(graph);
  for (auto& a : out) {
    a.phi = random_angle(rng);
    a.psi = random_angle(rng);
    for (auto& c : a.chi) c = random_angle(rng);
  }
  return out;
}

BackboneAngles random_backbone_angles(Rng& rng, std::size_t length) {
  std::vector<double> phi(length), psi(length);
  for (std::size_t j = 0; j < length; ++j) {
    phi[j] = random_angle(rng);
    psi[j] = random_angle(rng);
  }
  return BackboneAngles::trans(std::move(phi), std::move(psi));
}

std::array<double, 9> random_rotation(Rng& rng) {
  std::normal_distribution<double> gauss;
  double q[4], n = 0.0;
  do {
    n = 0.0;
    for (double& c : q) {
      c = gauss(rng);
      n += c * c;
    }
  } while (n < 1e-12);
  n = std::sqrt(n);
  for (double& c : q) c /= n;
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  return {1 - 2 * (y * y + z * z), 2 * (x * y - w * z),     2 * (x * z + w * y),
          2 * (x * y + w * z),     1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
          2 * (x * z - w * y),     2 * (y * z + w * x),     1 - 2 * (x * x + y * y)};
}

std::vector<Vec3d> apply_rigid(const std::array<double, 9>& r, const Vec3d& shift, std::span<const Vec3d> points) {
  std::vector<Vec3d> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    out.push_back(Vec3d{r[0] * p.x + r[1] * p.y + r[2] * p.z, r[3] * p.x + r[4] * p.y + r[5] * p.z,
                        r[6] * p.x + r[7] * p.y + r[8] * p.z} +
                  shift);
  }
  return out;
}

GradModel parse_grad_model(const std::string& name) {
  if (name == "backbone") return GradModel::kBackbone;
  if (name == "fullatom") return GradModel::kFullAtom;
  if (name == "lrmsd") return GradModel::kLrmsd;
  throw InputError("unknown model '" + name + "' (expected backbone, fullatom or lrmsd)");
}

std::string to_string(GradModel model) {
  switch (model) {
    case GradModel::kBackbone:
      return "backbone";
    case GradModel::kFullAtom:
      return "fullatom";
    case GradModel::kLrmsd:
      break;
  }
  return "lrmsd";
}

namespace {

struct Loss {
  std::string name;
  std::function<double(std::span<const Vec3d>)> value;
  std::function<std::vector<Vec3d>(std::span<const Vec3d>)> grad;
};

std::vector<Loss> chain_losses(Rng& rng, std::vector<Vec3d> target) {
  std::vector<Loss> losses;
  losses.push_back({"sum-of-squares",
                    [](std::span<const Vec3d> r) {
                      double s = 0.0;
                      for (const auto& p : r) s += dot(p, p);
                      return s;
                    },
                    [](std::span<const Vec3d> r) {
                      std::vector<Vec3d> g(r.size());
                      for (std::size_t i = 0; i < r.size(); ++i) g[i] = 2.0 * r[i];
                      return g;
                    }});
  losses.push_back({"lrmsd", [target](std::span<const Vec3d> r) { return lrmsd(r, target); },
                    [target](std::span<const Vec3d> r) { return lrmsd_gradient(r, target, align(r, target)); }});
  std::uniform_int_distribution<std::size_t> pick(0, target.size() - 1);
  const std::size_t atom = pick(rng);
  const std::array<double, 9> rot = random_rotation(rng);
  const Vec3d dir{rot[0], rot[3], rot[6]};
  losses.push_back({"projection", [atom, dir](std::span<const Vec3d> r) { return dot(r[atom], dir); },
                    [atom, dir](std::span<const Vec3d> r) {
                      std::vector<Vec3d> g(r.size());
                      g[atom] = dir;
                      return g;
                    }});
  return losses;
}

std::vector<double> flatten(std::span<const Vec3d> v) {
  std::vector<double> out;
  out.reserve(3 * v.size());
  for (const auto& p : v) {
    out.push_back(p.x);
    out.push_back(p.y);
    out.push_back(p.z);
  }
  return out;
}

std::vector<Vec3d> unflatten(std::span<const double> flat) {
  std::vector<Vec3d> out(flat.size() / 3);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]};
  return out;
}

void record(GradcheckReport& report, const GradientComparison& cmp, std::uint64_t seed, const std::string& loss) {
  ++report.comparisons;
  if (report.comparisons == 1 || cmp.max_relative_error > report.max_relative_error) {
    report.max_relative_error = cmp.max_relative_error;
    report.worst_seed = seed;
    report.worst_loss = loss;
    report.worst_index = cmp.worst_index;
    report.worst_analytic = cmp.worst_analytic;
    report.worst_numeric = cmp.worst_numeric;
  }
}

void check_full_atom(GradcheckReport& report, Rng& rng, std::uint64_t seed, std::size_t length, const FdConfig& fd) {
  const MoleculeGraph graph = build_graph(random_sequence(rng, length));
  const FullAtomAngles angles = random_full_atom_angles(rng, graph);
  const std::vector<Vec3d> target = fa_forward(graph, random_full_atom_angles(rng, graph)).coords.positions;
  const std::vector<double> at = flatten_angles(angles, false);
  for (const Loss& loss : chain_losses(rng, target)) {
    const FullAtomResult fwd = fa_forward(graph, angles);
    const std::vector<double> analytic = flatten_gradient(fa_backward(fwd.saved, loss.grad(fwd.coords.positions)));
    const std::vector<double> numeric = finite_difference_gradient(
        [&](std::span<const double> p) {
          return loss.value(fa_forward(graph, unflatten_angles(angles, p, false)).coords.positions);
        },
        at, fd);
    record(report, compare_gradients(analytic, numeric, fd.abs_floor), seed, loss.name);
  }
}

void check_backbone(GradcheckReport& report, Rng& rng, std::uint64_t seed, std::size_t length, const FdConfig& fd) {
  const BackboneAngles angles = random_backbone_angles(rng, length);
  const std::vector<Vec3d> target = bb_forward(random_backbone_angles(rng, length)).coords.positions;
  std::vector<double> at;
  for (std::size_t j = 0; j < length; ++j) {
    at.push_back(angles.phi[j]);
    at.push_back(angles.psi[j]);
  }
  auto with = [&](std::span<const double> p) {
    BackboneAngles a = angles;
    for (std::size_t j = 0; j < length; ++j) {
      a.phi[j] = p[2 * j];
      a.psi[j] = p[2 * j + 1];
    }
    return a;
  };
  for (const Loss& loss : chain_losses(rng, target)) {
    const BackboneResult<double> fwd = bb_forward(angles);
    const BackboneGradient g = bb_backward(fwd.saved, loss.grad(fwd.coords.positions));
    std::vector<double> analytic;
    for (std::size_t j = 0; j < length; ++j) {
      analytic.push_back(g.phi[j]);
      analytic.push_back(g.psi[j]);
    }
    const std::vector<double> numeric = finite_difference_gradient(
        [&](std::span<const double> p) { return loss.value(bb_forward(with(p)).coords.positions); }, at, fd);
    record(report, compare_gradients(analytic, numeric, fd.abs_floor), seed, loss.name);
  }
}

void check_lrmsd(GradcheckReport& report, Rng& rng, std::uint64_t seed, std::size_t length, const FdConfig& fd) {
  const std::vector<Vec3d> x = bb_forward(random_backbone_angles(rng, length)).coords.positions;
  // Target: x moved rigidly and perturbed, so the fit is close but not exact.
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Vec3d> perturbed = x;
  for (auto& p : perturbed) p += Vec3d{noise(rng), noise(rng), noise(rng)};
  const Vec3d shift{10.0 * noise(rng), 10.0 * noise(rng), 10.0 * noise(rng)};
  const std::vector<Vec3d> y = apply_rigid(random_rotation(rng), shift, perturbed);

  const Alignment al = align(x, y);
  const std::vector<Vec3d> g = lrmsd_gradient(x, y, al);
  const std::vector<double> numeric = finite_difference_gradient(
      [&](std::span<const double> p) { return lrmsd(unflatten(p), y); }, flatten(x), fd);
  record(report, compare_gradients(flatten(g), numeric, fd.abs_floor), seed, "lrmsd");

  Vec3d sum;
  for (const auto& v : g) sum += v;
  report.max_gradient_sum = std::max({report.max_gradient_sum, std::abs(sum.x), std::abs(sum.y), std::abs(sum.z)});

  const std::array<double, 9> rot = random_rotation(rng);
  const Vec3d axis{rot[0], rot[3], rot[6]};
  double directional = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) directional += dot(g[i], cross(axis, x[i]));
  report.max_rotation_derivative = std::max(report.max_rotation_derivative, std::abs(directional));
}

}  // namespace

GradcheckReport run_gradcheck(const GradcheckConfig& cfg) {
  if (cfg.length < 1) throw InputError("gradcheck: length must be at least 1");
  if (cfg.trials < 1) throw InputError("gradcheck: trials must be at least 1");
  validate(cfg.fd);
  GradcheckReport report;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const std::uint64_t seed = cfg.seed + t;
    Rng rng(seed);
    switch (cfg.model) {
      case GradModel::kFullAtom:
        check_full_atom(report, rng, seed, cfg.length, cfg.fd);
        break;
      case GradModel::kBackbone:
        check_backbone(report, rng, seed, cfg.length, cfg.fd);
        break;
      case GradModel::kLrmsd:
        check_lrmsd(report, rng, seed, cfg.length, cfg.fd);
        break;
    }
    ++report.trials_run;
  }
  report.passed = report.max_relative_error < cfg.tol;
  if (cfg.model == GradModel::kLrmsd) {
    report.passed = report.passed && report.max_gradient_sum < 1e-10 && report.max_rotation_derivative < 1e-7;
  }
  return report;
}

BenchOp parse_bench_op(const std::string& name) {
  if (name == "fullatom") return BenchOp::kFullAtom;
  if (name == "backbone") return BenchOp::kBackbone;
  if (name == "lrmsd") return BenchOp::kLrmsd;
  throw InputError("unknown op '" + name + "' (expected fullatom, backbone or lrmsd)");
}

std::string to_string(BenchOp op) {
  switch (op) {
    case BenchOp::kFullAtom:
      return "fullatom";
    case BenchOp::kBackbone:
      return "backbone";
    case BenchOp::kLrmsd:
      break;
  }
  return "lrmsd";
}

namespace {

using Clock = std::chrono::steady_clock;

template <class Fn>
double time_call(Fn&& fn) {
  const auto start = Clock::now();
  fn();
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return std::max(seconds, 1e-9);
}

std::vector<std::vector<Vec3d>> random_grads(Rng& rng, const std::vector<std::size_t>& sizes) {
  std::normal_distribution<double> gauss;
  std::vector<std::vector<Vec3d>> out;
  for (std::size_t n : sizes) {
    std::vector<Vec3d> g(n);
    for (auto& v : g) v = {gauss(rng), gauss(rng), gauss(rng)};
    out.push_back(std::move(g));
  }
  return out;
}

// Returns forward and backward wall times for one replicate.
std::pair<double, double> measure(BenchOp op, Rng& rng, int length, int batch, unsigned threads) {
  const auto len = static_cast<std::size_t>(length);
  const auto n = static_cast<std::size_t>(batch);
  double forward = 0.0, backward = 0.0;
  switch (op) {
    case BenchOp::kFullAtom: {
      std::vector<MoleculeGraph> graphs;
      std::vector<FullAtomAngles> angles;
      for (std::size_t b = 0; b < n; ++b) {
        graphs.push_back(build_graph(random_sequence(rng, len)));
        angles.push_back(random_full_atom_angles(rng, graphs.back()));
      }
      std::vector<FullAtomResult> fwd;
      forward = time_call([&] { fwd = fa_forward_batch(graphs, angles, {}, threads); });
      std::vector<std::size_t> sizes;
      for (const auto& g : graphs) sizes.push_back(g.atom_count());
      const auto grads = random_grads(rng, sizes);
      backward = time_call([&] { fa_backward_batch(fwd, grads, threads); });
      break;
    }
    case BenchOp::kBackbone: {
      std::vector<BackboneAngles> items;
      for (std::size_t b = 0; b < n; ++b) items.push_back(random_backbone_angles(rng, len));
      const BackboneBatch packed = BackboneBatch::pack(items);
      std::vector<BackboneResult<double>> fwd;
      forward = time_call([&] { fwd = bb_forward_batch(packed, threads); });
      const auto grads = random_grads(rng, std::vector<std::size_t>(n, 3 * len));
      backward = time_call([&] { bb_backward_batch(fwd, grads, threads); });
      break;
    }
    case BenchOp::kLrmsd: {
      std::vector<std::vector<Vec3d>> xs, ys;
      for (std::size_t b = 0; b < n; ++b) {
        xs.push_back(bb_forward(random_backbone_angles(rng, len)).coords.positions);
        ys.push_back(bb_forward(random_backbone_angles(rng, len)).coords.positions);
      }
      std::vector<Alignment> als(n);
      forward = time_call([&] { parallel_for(n, threads, [&](std::size_t b) { als[b] = align(xs[b], ys[b]); }); });
      std::vector<std::vector<Vec3d>> grads(n);
      backward = time_call([&] {
        parallel_for(n, threads, [&](std::size_t b) { grads[b] = lrmsd_gradient(xs[b], ys[b], als[b]); });
      });
      break;
    }
  }
  return {forward, backward};
}

}  // namespace

std::vector<BenchRow> run_scaling_benchmark(const BenchConfig& cfg, const std::function<void(const BenchRow&)>& on_row) {
  if (cfg.min_len < 1 || cfg.max_len < cfg.min_len || cfg.step < 1) {
    throw InputError("bench: need 1 <= min-len <= max-len and step >= 1");
  }
  if (cfg.batch < 1 || cfg.reps < 1) throw InputError("bench: batch and reps must be at least 1");
  std::vector<BenchRow> rows;
  Rng rng(cfg.seed);
  const std::string op = to_string(cfg.op);
  for (int len = cfg.min_len; len <= cfg.max_len; len += cfg.step) {
    for (int rep = 1; rep <= cfg.reps; ++rep) {
      const auto [fwd, bwd] = measure(cfg.op, rng, len, cfg.batch, cfg.threads);
      for (const BenchRow& row : {BenchRow{op, len, cfg.batch, "forward", rep, fwd, cfg.threads},
                                  BenchRow{op, len, cfg.batch, "backward", rep, bwd, cfg.threads}}) {
        rows.push_back(row);
        if (on_row) on_row(row);
      }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << kBenchCsvVersion << '\n' << "op_name,sequence_length,batch_size,pass,replicate,wall_time,threads\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.9g", r.wall_time);
    out << r.op_name << ',' << r.sequence_length << ',' << r.batch_size << ',' << r.pass << ',' << r.replicate << ','
        << buf << ',' << r.threads << '\n';
  }
}

namespace {

template <class T>
T parse_number(const std::string& field, int line_no, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(std::string("malformed ") + what + " '" + field + "'", line_no);
  }
  return value;
}

}  // namespace

std::vector<BenchRow> read_bench_csv(std::istream& in) {
  std::vector<BenchRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || line.rfind("op_name,", 0) == 0) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 7) throw ParseError("expected 7 fields, got " + std::to_string(f.size()), line_no);
    BenchRow r;
    r.op_name = f[0];
    r.sequence_length = parse_number<int>(f[1], line_no, "sequence_length");
    r.batch_size = parse_number<int>(f[2], line_no, "batch_size");
    r.pass = f[3];
    r.replicate = parse_number<int>(f[4], line_no, "replicate");
    r.wall_time = parse_number<double>(f[5], line_no, "wall_time");
    r.threads = parse_number<unsigned>(f[6], line_no, "threads");
    if (r.pass != "forward" && r.pass != "backward") throw ParseError("pass must be forward or backward", line_no);
    if (!(r.wall_time > 0.0)) throw ParseError("wall_time must be positive", line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

std::pair<double, double> least_squares(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return {slope, my - slope * mx};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

ComplexityFit fit_complexity(const std::vector<BenchRow>& rows) {
  std::map<int, std::vector<double>> by_length;
  for (const auto& r : rows) {
    if (r.sequence_length <= 0 || !(r.wall_time > 0.0)) throw InputError("fit: lengths and times must be positive");
    by_length[r.sequence_length].push_back(r.wall_time);
  }
  if (by_length.size() < 3) {
    throw InputError("fit: need at least 3 distinct lengths, got " + std::to_string(by_length.size()));
  }
  std::vector<double> xs, ys;
  for (const auto& [len, times] : by_length) {
    xs.push_back(std::log(static_cast<double>(len)));
    ys.push_back(std::log(median(times)));
  }
  ComplexityFit fit;
  std::tie(fit.slope, fit.intercept) = least_squares(xs, ys);
  fit.lengths = by_length.size();
  if (!rows.empty()) {
    fit.op_name = rows.front().op_name;
    fit.pass = rows.front().pass;
  }
  return fit;
}

std::vector<ComplexityFit> fit_complexity_groups(const std::vector<BenchRow>& rows) {
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::vector<BenchRow>> groups;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.op_name, r.pass);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(r);
  }
  std::vector<ComplexityFit> out;
  for (const auto& key : order) out.push_back(fit_complexity(groups[key]));
  return out;
}

std::vector<double> binned_means(std::span<const double> values, std::size_t bins) {
  bins = std::min(bins, values.size());
  std::vector<double> out;
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t begin = values.size() * b / bins;
    const std::size_t end = values.size() * (b + 1) / bins;
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += values[i];
    out.push_back(sum / static_cast<double>(end - begin));
  }
  return out;
}

double binned_trend_slope(std::span<const double> values, std::size_t bins) {
  const std::vector<double> ys = binned_means(values, bins);
  if (ys.size() < 2) return 0.0;
  std::vector<double> xs;
  for (std::size_t b = 0; b < ys.size(); ++b) {
    const std::size_t begin = values.size() * b / ys.size();
    const std::size_t end = values.size() * (b + 1) / ys.size();
    xs.push_back(0.5 * static_cast<double>(begin + end - 1));
  }
  return least_squares(xs, ys).first;
}

PrecisionResult run_precision_experiment(const PrecisionConfig& cfg) {
  if (cfg.max_len < 1) throw InputError("precision: max-len must be at least 1");
  if (cfg.reps < 1) throw InputError("precision: reps must be at least 1");
  const auto len = static_cast<std::size_t>(cfg.max_len);
  const std::size_t n_atoms = 3 * len;
  std::vector<std::vector<double>> errors(n_atoms);
  Rng rng(cfg.seed);
  for (int rep = 0; rep < cfg.reps; ++rep) {
    const MoleculeGraph graph = build_graph(random_sequence(rng, len));
    const FullAtomAngles fa_angles = random_full_atom_angles(rng, graph);
    BackboneAngles bb_angles;
    for (const auto& a : fa_angles) {
      bb_angles.phi.push_back(a.phi);
      bb_angles.psi.push_back(a.psi);
      bb_angles.omega.push_back(a.omega);
    }
    const FullAtomResult reference = fa_forward(graph, fa_angles);
    const BackboneResult<float> single = bb_forward_f32(bb_angles);
    for (std::size_t j = 0; j < len; ++j) {
      for (std::size_t k = 0; k < 3; ++k) {
        const Vec3d& ref = reference.coords.positions[graph.backbone_atoms[j][k]];
        errors[3 * j + k].push_back(distance(ref, single.coords.positions[3 * j + k]));
      }
    }
  }

  PrecisionResult out;
  const double n = static_cast<double>(cfg.reps);
  const double t = cfg.reps > 1 ? boost::math::quantile(boost::math::complement(
                                      boost::math::students_t_distribution<double>(n - 1.0), 0.025))
                                : 0.0;
  std::vector<double> means;
  for (std::size_t i = 0; i < n_atoms; ++i) {
    double mean = 0.0;
    for (double e : errors[i]) mean += e;
    mean /= n;
    double var = 0.0;
    for (double e : errors[i]) var += (e - mean) * (e - mean);
    const double half = cfg.reps > 1 ? t * std::sqrt(var / (n - 1.0)) / std::sqrt(n) : 0.0;
    out.rows.push_back({i, mean, std::max(0.0, mean - half), mean + half});
    means.push_back(mean);
    if (mean > out.max_mean_error) {
      out.max_mean_error = mean;
      out.max_index = i;
    }
  }
  out.trend_slope = binned_trend_slope(means);
  out.bin_means = binned_means(means);
  out.monotone = std::is_sorted(out.bin_means.begin(), out.bin_means.end());
  return out;
}

void write_precision_csv(std::ostream& out, const std::vector<PrecisionRow>& rows) {
  out << kPrecisionCsvVersion << '\n' << "atom_index,mean_error,ci95_low,ci95_high\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%.9g\n", r.atom_index, r.mean_error, r.ci95_low, r.ci95_high);
    out << buf;
  }
}

}  // namespace protkin
