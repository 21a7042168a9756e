#include "bayesic/limits.hpp"

#include <cmath>
#include <numbers>

#include "bayesic/errors.hpp"

namespace bayesic {

LimitValue limit_geometric(double ex) {
  if (!(ex > 0.0) || !std::isfinite(ex)) throw DomainError("limit_geometric: EX must be finite and > 0");
  const double value = 2.0 * std::log1p(ex) - 2.0 * ex * std::log(ex / (1.0 + ex));
  return {ModelKind::Geometric, value, {ex}};
}

LimitValue limit_normal(std::size_t p, double e_norm_sq, double norm_e_sq) {
  if (p == 0) throw DomainError("limit_normal: p must be >= 1");
  if (!(norm_e_sq >= 0.0) || !(e_norm_sq >= norm_e_sq) || !std::isfinite(e_norm_sq)) {
    throw DomainError("limit_normal: need E||X||^2 >= ||EX||^2 >= 0");
  }
  const double value = static_cast<double>(p) * std::log(2.0 * std::numbers::pi) + e_norm_sq - norm_e_sq;
  return {ModelKind::Normal, value, {static_cast<double>(p), e_norm_sq, norm_e_sq}};
}

LimitValue limit_laplace(double gamma0) {
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) throw DomainError("limit_laplace: gamma0 must be > 0");
  return {ModelKind::Laplace, 2.0 * std::log(2.0 * gamma0) + 2.0, {gamma0}};
}

LimitValue limit_for(const ModelSpec& model, const DataGeneratingProcess& dgp) {
  if (model.kind() != dgp.kind()) throw ArgumentError("limit_for: model and DGP families differ");
  switch (model.kind()) {
    case ModelKind::Geometric:
      return limit_geometric(dgp.expectation());
    case ModelKind::Normal:
      return limit_normal(dgp.normal_mean().size(), dgp.expected_sq_norm(), dgp.sq_norm_of_mean());
    case ModelKind::Laplace:
      return limit_laplace(dgp.laplace_scale());
  }
  throw ArgumentError("unknown model");
}

}  // namespace bayesic
