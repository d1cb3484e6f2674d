#pragma once

// Reference computations for testing: central finite differences and a
// direct search for the least RMSD. Nothing here calls the analytic code it
// is used to check.

#include <functional>
#include <span>
#include <vector>

#include "protkin/geometry.hpp"

namespace protkin {

struct FdConfig {
  double step = 1e-6;
  double rel_tol = 1e-5;
  double abs_floor = 1e-9;
};

// Throws DomainError unless step and both tolerances are positive.
void validate(const FdConfig& cfg);

using ScalarFunction = std::function<double(std::span<const double>)>;

// (f(x + h e_k) - f(x - h e_k)) / 2h for every k. Throws EvaluationError if f
// returns a non-finite value.
std::vector<double> finite_difference_gradient(const ScalarFunction& f, std::span<const double> at,
                                               const FdConfig& cfg = {});

struct GradientComparison {
  double max_relative_error = 0.0;  // max_k |a_k - n_k| / scale
  double scale = 0.0;               // max(|a|_inf, |n|_inf, abs_floor)
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Errors are measured relative to the largest gradient component, so tiny
// components are not judged against their own near-zero magnitude. Throws
// InputError on a length mismatch.
GradientComparison compare_gradients(std::span<const double> analytic, std::span<const double> numeric,
                                     double abs_floor = 1e-9);

// Least RMSD by scanning a grid x grid x grid lattice of rotation vectors over
// [-pi, pi]^3 and refining the best cells by coordinate descent with
// `refine_steps` step halvings. Throws InputError on count mismatch, empty
// input or grid < 16.
double brute_force_lrmsd(std::span<const Vec3d> x, std::span<const Vec3d> y, int grid = 32, int refine_steps = 60);

}  // namespace protkin
