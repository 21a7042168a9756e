#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "bayesic/models.hpp"
#include "bayesic/posterior.hpp"

namespace bayesic {

enum class CriterionKind { DIC, BPIC, WBIC };
enum class Method { ClosedForm, PoincareApprox, Quadrature };

std::string_view to_string(CriterionKind kind);
std::string_view to_string(Method method);

/// One evaluated criterion, on the per-observation scale: n * DIC_n and
/// n * BPIC_n are the conventional deviance-scale values, n * WBIC_n / 2 the
/// conventional WBIC.
struct CriterionValue {
  CriterionKind kind;
  std::uint64_t n;
  double beta_n;
  double value;
  Method method;
};

/// Node counts for quadrature fallbacks.
struct GridOptions {
  std::size_t nodes_1d = 4096;
  std::size_t nodes_2d = 256;
  // Half-width of the normal quadrature window in posterior standard deviations.
  double normal_window_sd = 8.0;
};

/// E_post[avg_loglik(theta)] with the exact formula for closed forms and the
/// quadrature sum on grids.
double expected_avg_loglik(const ModelSpec& model, const ObservedSample& sample,
                           const PowerPosterior& post);

/// Posterior for the given temperature: conjugate closed form for geometric
/// and normal, grid over the parameter box for Laplace.
PowerPosterior power_posterior_for(const ModelSpec& model, const ObservedSample& sample,
                                   double beta_n, const GridOptions& grid = {});

/// Grid posterior for any model. Normal models use the window
/// m +- normal_window_sd * sqrt(v) per axis around the conjugate posterior.
PowerPosterior quadrature_posterior_for(const ModelSpec& model, const ObservedSample& sample,
                                        double beta_n, const GridOptions& grid = {});

// -2 E[avg_loglik] + 2 p / n. Requires an untempered posterior.
CriterionValue bpic(const ModelSpec& model, const ObservedSample& sample, const PowerPosterior& post);

// -4 E[avg_loglik] + 2 avg_loglik(posterior mean). Requires an untempered posterior.
CriterionValue dic(const ModelSpec& model, const ObservedSample& sample, const PowerPosterior& post);

// -2 E[avg_loglik] under the power posterior at beta_n.
CriterionValue wbic(const ModelSpec& model, const ObservedSample& sample, const PowerPosterior& post);
CriterionValue wbic(const ModelSpec& model, const ObservedSample& sample, double beta_n,
                    const GridOptions& grid = {});
CriterionValue wbic(const ModelSpec& model, const ObservedSample& sample, BetaSchedule schedule,
                    const GridOptions& grid = {});

CriterionValue dic_geometric_exact(double alpha, double beta, std::uint64_t n, double xbar);
CriterionValue dic_geometric_approx(double alpha, double beta, std::uint64_t n, double xbar);

/// DIC, BPIC or WBIC for a Laplace model on a nodes_per_axis^2 grid over the
/// box. beta_n is only used for WBIC; DIC and BPIC use beta_n = 1.
CriterionValue laplace_criteria(const ModelSpec& model, const ObservedSample& sample,
                                CriterionKind which, double beta_n = 1.0,
                                std::size_t nodes_per_axis = 256);
CriterionValue laplace_criteria(const ModelSpec& model, const ObservedSample& sample,
                                CriterionKind which, BetaSchedule schedule,
                                std::size_t nodes_per_axis = 256);

/// Multiply a criterion onto the conventional scale: n * DIC_n, n * BPIC_n,
/// n * WBIC_n / 2.
double rescale_to_n(CriterionKind kind, std::uint64_t n, double value);

}  // namespace bayesic
