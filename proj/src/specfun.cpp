#include "bayesic/specfun.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "bayesic/errors.hpp"
#include "bayesic/kernels.hpp"

namespace bayesic {
namespace {

void require_positive_finite(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(what) + ": argument must be finite and > 0, got " +
                      std::to_string(x));
  }
}

constexpr double kAsymptoticThreshold = 20.0;

}  // namespace

double digamma(double x) {
  require_positive_finite(x, "digamma");
  // Shift count is at most 20, so the reciprocals are accumulated from the
  // largest argument (smallest term) down.
  int shift = 0;
  if (x < kAsymptoticThreshold) shift = static_cast<int>(std::ceil(kAsymptoticThreshold - x));
  double correction = 0.0;
  for (int k = shift - 1; k >= 0; --k) correction += 1.0 / (x + k);

  const double z = x + shift;
  const double inv2 = 1.0 / (z * z);
  // B2/2, B4/4, ..., B10/10 with alternating signs.
  const double series =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
  return std::log(z) - 0.5 / z - series - correction;
}

double digamma_poincare(double a) {
  require_positive_finite(a, "digamma_poincare");
  return std::log(a) - 1.0 / (2.0 * a);
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("log_sum_exp: empty input");
  const double m = kernels::max_value(values);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  if (m == std::numeric_limits<double>::infinity()) return m;
  std::vector<double> scratch(values.size());
  return m + std::log(kernels::exp_shifted(values, m, scratch));
}

double log_beta_function(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

double incomplete_beta_complement(double a, double b, double x) {
  if (x <= 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  return boost::math::ibetac(a, b, x);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_ccdf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

}  // namespace bayesic
