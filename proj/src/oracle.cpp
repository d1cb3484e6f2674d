#include "protkin/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "protkin/errors.hpp"

namespace protkin {

void validate(const FdConfig& cfg) {
  if (!(cfg.step > 0.0) || !(cfg.rel_tol > 0.0) || !(cfg.abs_floor > 0.0)) {
    throw DomainError("FdConfig: step and tolerances must be positive");
  }
}

std::vector<double> finite_difference_gradient(const ScalarFunction& f, std::span<const double> at,
                                               const FdConfig& cfg) {
  validate(cfg);
  std::vector<double> x(at.begin(), at.end());
  std::vector<double> grad(x.size());
  auto eval = [&](std::size_t k, double sign) {
    const double v = f(x);
    if (!std::isfinite(v)) {
      throw EvaluationError("finite_difference_gradient: non-finite value at component " + std::to_string(k) +
                            (sign > 0 ? " (+h)" : " (-h)"));
    }
    return v;
  };
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double saved = x[k];
    x[k] = saved + cfg.step;
    const double plus = eval(k, 1.0);
    x[k] = saved - cfg.step;
    const double minus = eval(k, -1.0);
    x[k] = saved;
    grad[k] = (plus - minus) / (2.0 * cfg.step);
  }
  return grad;
}

GradientComparison compare_gradients(std::span<const double> analytic, std::span<const double> numeric,
                                     double abs_floor) {
  if (analytic.size() != numeric.size()) {
    throw InputError("compare_gradients: " + std::to_string(analytic.size()) + " analytic vs " +
                     std::to_string(numeric.size()) + " numeric components");
  }
  GradientComparison out;
  out.scale = abs_floor;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    out.scale = std::max({out.scale, std::abs(analytic[k]), std::abs(numeric[k])});
  }
  double worst = -1.0;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    const double diff = std::abs(analytic[k] - numeric[k]);
    if (!(diff <= worst)) {
      worst = diff;
      out.worst_index = k;
      out.worst_analytic = analytic[k];
      out.worst_numeric = numeric[k];
    }
  }
  out.max_relative_error = analytic.empty() ? 0.0 : worst / out.scale;
  return out;
}

namespace {

using Rotation = std::array<double, 9>;

// Rodrigues formula for the rotation vector v.
Rotation axis_angle(const Vec3d& v) {
  const double angle = norm(v);
  Rotation r{1, 0, 0, 0, 1, 0, 0, 0, 1};
  if (angle < 1e-15) return r;
  const Vec3d k = v / angle;
  const double s = std::sin(angle), c = 1.0 - std::cos(angle);
  const double kk[3][3] = {{0, -k.z, k.y}, {k.z, 0, -k.x}, {-k.y, k.x, 0}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double k2 = 0.0;
      for (int m = 0; m < 3; ++m) k2 += kk[i][m] * kk[m][j];
      r[3 * i + j] += s * kk[i][j] + c * k2;
    }
  }
  return r;
}

struct Problem {
  std::vector<Vec3d> x, y;

  double rmsd(const Vec3d& v) const {
    const Rotation r = axis_angle(v);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const Vec3d& p = x[i];
      const Vec3d q{r[0] * p.x + r[1] * p.y + r[2] * p.z, r[3] * p.x + r[4] * p.y + r[5] * p.z,
                    r[6] * p.x + r[7] * p.y + r[8] * p.z};
      const Vec3d d = q - y[i];
      sum += dot(d, d);
    }
    return std::sqrt(sum / static_cast<double>(x.size()));
  }
};

std::vector<Vec3d> centered(std::span<const Vec3d> pts) {
  Vec3d c;
  for (const auto& p : pts) c += p;
  c = c / static_cast<double>(pts.size());
  std::vector<Vec3d> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(p - c);
  return out;
}

}  // namespace

double brute_force_lrmsd(std::span<const Vec3d> x, std::span<const Vec3d> y, int grid, int refine_steps) {
  if (x.size() != y.size()) {
    throw InputError("brute_force_lrmsd: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()) + " points");
  }
  if (x.empty()) throw InputError("brute_force_lrmsd: empty input");
  if (grid < 16) throw InputError("brute_force_lrmsd: grid must be at least 16");
  const Problem prob{centered(x), centered(y)};

  constexpr std::size_t kCandidates = 8;
  std::vector<std::pair<double, Vec3d>> best;  // sorted ascending by value
  const double spacing = 2.0 * kPi / (grid - 1);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      for (int k = 0; k < grid; ++k) {
        const Vec3d v{-kPi + i * spacing, -kPi + j * spacing, -kPi + k * spacing};
        const double value = prob.rmsd(v);
        if (best.size() < kCandidates || value < best.back().first) {
          best.emplace_back(value, v);
          std::sort(best.begin(), best.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
          if (best.size() > kCandidates) best.pop_back();
        }
      }
    }
  }

  double result = best.front().first;
  for (auto [value, v] : best) {
    double step = spacing;
    for (int level = 0; level < refine_steps; ++level) {
      // Descend along each axis at this step size until no move helps.
      for (int sweep = 0; sweep < 200; ++sweep) {
        bool moved = false;
        for (int axis = 0; axis < 3; ++axis) {
          for (double sign : {1.0, -1.0}) {
            Vec3d trial = v;
            (axis == 0 ? trial.x : axis == 1 ? trial.y : trial.z) += sign * step;
            const double tv = prob.rmsd(trial);
            if (tv < value) {
              value = tv;
              v = trial;
              moved = true;
            }
          }
        }
        if (!moved) break;
      }
      step *= 0.5;
    }
    result = std::min(result, value);
  }
  return result;
}

}  // namespace protkin
