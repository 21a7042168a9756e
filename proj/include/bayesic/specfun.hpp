#pragma once

#include <span>

namespace bayesic {

/// Digamma function psi(x) = d/dx log Gamma(x) for x > 0.
///
/// Upward recurrence psi(x) = psi(x + 1) - 1/x until the argument reaches 20,
/// then the asymptotic series through the x^-10 term. Relative accuracy is
/// better than 1e-12 for x >= 1e-6 (absolute near the root at x ~ 1.4616).
/// Throws DomainError for non-positive or non-finite x.
double digamma(double x);

/// Two-term Poincare approximation log(a) - 1/(2a), with no further
/// correction. The truncation error is about 1/(12 a^2).
double digamma_poincare(double a);

/// log(sum_i exp(values[i])) with max-shifting. Returns -inf when every entry
/// is -inf and +inf if any entry is +inf. Throws ArgumentError when empty.
double log_sum_exp(std::span<const double> values);

double log_beta_function(double a, double b);

// Regularized incomplete beta I_x(a, b) and its complement 1 - I_x(a, b).
double incomplete_beta(double a, double b, double x);
double incomplete_beta_complement(double a, double b, double x);

double normal_cdf(double z);
double normal_ccdf(double z);

}  // namespace bayesic
