#include "protkin/geometry.hpp"

#include <string>

namespace protkin {

void validate_params(const TransformParams& params) {
  if (!(params.d > 0.0)) {
    throw DomainError("bond length must be positive, got " + std::to_string(params.d));
  }
  if (!(params.theta > 0.0 && params.theta < 2.0 * kPi)) {
    throw DomainError("theta must lie in (0, 2pi), got " + std::to_string(params.theta));
  }
}

Transform<double> bond_transform(const TransformParams& params, double alpha) {
  validate_params(params);
  return bond_transform_unchecked(params.theta, params.d, alpha);
}

TangentMatrix<double> bond_transform_derivative(const TransformParams& params, double alpha) {
  validate_params(params);
  return bond_transform_derivative_unchecked(params.theta, alpha);
}

}  // namespace protkin
