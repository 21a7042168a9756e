#pragma once

// Data-parallel reductions used by the sample statistics and grid posteriors.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds,
// an AVX2/FMA variant. The dispatching entry points in bayesic::kernels pick
// the best variant supported by the host at first use; BAYESIC_ISA=scalar in
// the environment (or set_active_isa) forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace bayesic::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);
Isa detected_isa();
Isa active_isa();
// Throws ArgumentError if the host cannot run `isa`.
void set_active_isa(Isa isa);

double sum(std::span<const double> x);
double sum_sq(std::span<const double> x);
// sum_i |x_i - center|
double sum_abs_dev(std::span<const double> x, double center);
// Largest non-NaN entry; -inf for an empty span.
double max_value(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
// out[i] = exp(x[i] - shift); returns sum of out. Results below ~1e-308 are
// flushed to zero.
double exp_shifted(std::span<const double> x, double shift, std::span<double> out);
void scale(std::span<double> x, double factor);

namespace scalar {
double sum(std::span<const double> x);
double sum_sq(std::span<const double> x);
double sum_abs_dev(std::span<const double> x, double center);
double max_value(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
double exp_shifted(std::span<const double> x, double shift, std::span<double> out);
void scale(std::span<double> x, double factor);
}  // namespace scalar

#if defined(BAYESIC_HAVE_AVX2)
namespace avx2 {
double sum(std::span<const double> x);
double sum_sq(std::span<const double> x);
double sum_abs_dev(std::span<const double> x, double center);
double max_value(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
double exp_shifted(std::span<const double> x, double shift, std::span<double> out);
void scale(std::span<double> x, double factor);
}  // namespace avx2
#endif

}  // namespace bayesic::kernels
