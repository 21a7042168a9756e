#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "bayesic/kernels.hpp"
#include "doctest.h"

using namespace bayesic::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double scale) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = z(gen);
  return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("isa selection") {
  CHECK(isa_supported(Isa::Scalar));
  const Isa before = active_isa();
  set_active_isa(Isa::Scalar);
  CHECK(active_isa() == Isa::Scalar);
  set_active_isa(before);
  CHECK(isa_name(Isa::Avx2) == "avx2");
}

TEST_CASE("scalar reductions") {
  const std::vector<double> v{1.0, -2.0, 3.5, 4.0, -0.5};
  CHECK(scalar::sum(v) == 6.0);
  CHECK(scalar::sum_sq(v) == 1.0 + 4.0 + 12.25 + 16.0 + 0.25);
  CHECK(scalar::sum_abs_dev(v, 1.0) == 0.0 + 3.0 + 2.5 + 3.0 + 1.5);
  CHECK(scalar::max_value(v) == 4.0);
  CHECK(scalar::dot(v, v) == scalar::sum_sq(v));
  CHECK(scalar::max_value(std::vector<double>{}) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("exp_shifted flushes deep underflow") {
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> x{0.0, -inf, -800.0, -1.0};
  std::vector<double> out(x.size());
  const double s = scalar::exp_shifted(x, 0.0, out);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 0.0);
  CHECK(out[3] == std::exp(-1.0));
  CHECK(s == 1.0 + std::exp(-1.0));
}

#if BAYESIC_HAVE_AVX2
TEST_CASE("avx2 kernels agree with scalar references") {
  if (!isa_supported(Isa::Avx2)) return;
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 31u, 1000u, 4097u}) {
    const auto v = random_vector(n, 100 + n, 3.0);
    const auto w = random_vector(n, 200 + n, 1.0);
    CHECK(rel(avx2::sum(v), scalar::sum(v)) <= 1e-13);
    CHECK(rel(avx2::sum_sq(v), scalar::sum_sq(v)) <= 1e-13);
    CHECK(rel(avx2::sum_abs_dev(v, 0.7), scalar::sum_abs_dev(v, 0.7)) <= 1e-13);
    CHECK(avx2::max_value(v) == scalar::max_value(v));
    CHECK(rel(avx2::dot(v, w), scalar::dot(v, w)) <= 1e-13);

    std::vector<double> a(n), b(n);
    const double shift = n ? scalar::max_value(v) : 0.0;
    const double sa = avx2::exp_shifted(v, shift, a);
    const double sb = scalar::exp_shifted(v, shift, b);
    CHECK(rel(sa, sb) <= 1e-13);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) <= 2e-15 * b[i] + 1e-300);

    avx2::scale(a, 0.25);
    scalar::scale(b, 0.25);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) <= 2e-15 * b[i] + 1e-300);
  }
}

TEST_CASE("avx2 exp across the full range") {
  if (!isa_supported(Isa::Avx2)) return;
  std::vector<double> x;
  for (double t = -760.0; t <= 709.0; t += 0.37) x.push_back(t);
  x.push_back(-std::numeric_limits<double>::infinity());
  x.push_back(-708.3964185322641);
  x.push_back(-708.39);
  std::vector<double> a(x.size()), b(x.size());
  avx2::exp_shifted(x, 0.0, a);
  scalar::exp_shifted(x, 0.0, b);
  for (std::size_t i = 0; i < x.size(); ++i) {
    INFO("x = " << x[i]);
    CHECK(std::abs(a[i] - b[i]) <= 4e-16 * b[i]);
  }
}

TEST_CASE("avx2 max ignores NaN") {
  if (!isa_supported(Isa::Avx2)) return;
  std::vector<double> v{1.0, std::nan(""), 5.0, 2.0, std::nan(""), -1.0};
  CHECK(avx2::max_value(v) == 5.0);
  CHECK(scalar::max_value(v) == 5.0);
}
#endif

TEST_CASE("dispatched kernels match the scalar path") {
  const auto v = random_vector(1003, 7, 2.0);
  CHECK(rel(sum(v), scalar::sum(v)) <= 1e-13);
  CHECK(rel(sum_sq(v), scalar::sum_sq(v)) <= 1e-13);
  CHECK(max_value(v) == scalar::max_value(v));
}
