#include <cmath>
#include <limits>

#include "bayesic/kernels.hpp"
#include "exp_limits.hpp"

namespace bayesic::kernels::scalar {

double sum(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc;
}

double sum_sq(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

double sum_abs_dev(std::span<const double> x, double center) {
  double acc = 0.0;
  for (double v : x) acc += std::fabs(v - center);
  return acc;
}

double max_value(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) {
    if (v > m) m = v;
  }
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double exp_shifted(std::span<const double> x, double shift, std::span<double> out) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - shift;
    const double e = d < detail::kExpFlushBelow ? 0.0 : std::exp(d);
    out[i] = e;
    acc += e;
  }
  return acc;
}

void scale(std::span<double> x, double factor) {
  for (double& v : x) v *= factor;
}

}  // namespace bayesic::kernels::scalar
