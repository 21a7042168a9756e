#include "bayesic/criteria.hpp"

#include <array>
#include <cmath>
#include <string>

#include "bayesic/errors.hpp"
#include "bayesic/specfun.hpp"

namespace bayesic {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;

void require_untempered(const PowerPosterior& post, const char* what) {
  if (const auto t = post.temperature(); t && *t != 1.0) {
    throw ContractError(std::string(what) + " requires the untempered posterior (beta_n = 1), got beta_n = " +
                        std::to_string(*t));
  }
}

Method method_of(const PowerPosterior& post) {
  return post.grid() ? Method::Quadrature : Method::ClosedForm;
}

void require_dims(const ModelSpec& model, const PowerPosterior& post) {
  if (post.dim() != model.dim()) {
    throw ArgumentError("posterior dimension does not match the model");
  }
}

}  // namespace

std::string_view to_string(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::DIC:
      return "DIC";
    case CriterionKind::BPIC:
      return "BPIC";
    case CriterionKind::WBIC:
      return "WBIC";
  }
  return "unknown";
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::ClosedForm:
      return "closed-form";
    case Method::PoincareApprox:
      return "poincare";
    case Method::Quadrature:
      return "quadrature";
  }
  return "unknown";
}

double expected_avg_loglik(const ModelSpec& model, const ObservedSample& sample,
                           const PowerPosterior& post) {
  require_dims(model, post);
  if (const auto* b = post.beta()) {
    if (model.kind() != ModelKind::Geometric) throw ArgumentError("Beta posterior needs a geometric model");
    if (!sample.nonneg_integers()) throw DomainError("geometric observations must be non-negative integers");
    const double xbar = sample.mean()[0];
    const double psi_ab = digamma(b->a + b->b);
    return xbar * (digamma(b->b) - psi_ab) + digamma(b->a) - psi_ab;
  }
  if (const auto* nrm = post.normal()) {
    if (model.kind() != ModelKind::Normal) throw ArgumentError("normal posterior needs a normal model");
    if (sample.cols() != model.obs_dim()) throw ArgumentError("sample dimension does not match the model");
    const auto& xbar = sample.mean();
    const double p = static_cast<double>(nrm->mean.size());
    double cross = 0.0;
    double norm = 0.0;
    for (std::size_t j = 0; j < nrm->mean.size(); ++j) {
      cross += xbar[j] * nrm->mean[j];
      norm += nrm->mean[j] * nrm->mean[j];
    }
    const double n = static_cast<double>(sample.size());
    return -0.5 * p * kLog2Pi - 0.5 * (sample.sum_sq() / n - 2.0 * cross + norm + p * nrm->variance);
  }
  const AverageLoglik loglik(model, sample);
  return posterior_expect(post, Functional::custom([&](std::span<const double> theta) {
                            return loglik(theta);
                          }));
}

PowerPosterior power_posterior_for(const ModelSpec& model, const ObservedSample& sample,
                                   double beta_n, const GridOptions& grid) {
  switch (model.kind()) {
    case ModelKind::Geometric:
      if (!sample.nonneg_integers()) throw DomainError("geometric observations must be non-negative integers");
      return geometric_power_posterior(model.alpha(), model.beta(), sample.size(), sample.mean()[0],
                                       beta_n);
    case ModelKind::Normal:
      if (sample.cols() != model.dim()) throw ArgumentError("sample dimension does not match the model");
      return normal_power_posterior(model.prior_mean(), sample.size(), sample.mean(), beta_n);
    case ModelKind::Laplace:
      return quadrature_posterior_for(model, sample, beta_n, grid);
  }
  throw ArgumentError("unknown model");
}

PowerPosterior quadrature_posterior_for(const ModelSpec& model, const ObservedSample& sample,
                                        double beta_n, const GridOptions& grid) {
  switch (model.kind()) {
    case ModelKind::Geometric: {
      const std::array<std::size_t, 1> nodes{grid.nodes_1d};
      return power_grid_posterior(model, sample, beta_n, model.parameter_box(), nodes);
    }
    case ModelKind::Laplace: {
      const std::array<std::size_t, 2> nodes{grid.nodes_2d, grid.nodes_2d};
      return power_grid_posterior(model, sample, beta_n, model.parameter_box(), nodes);
    }
    case ModelKind::Normal: {
      const PowerPosterior exact = power_posterior_for(model, sample, beta_n);
      const auto& np = *exact.normal();
      const double half = grid.normal_window_sd * std::sqrt(np.variance);
      Box box;
      for (double m : np.mean) box.axes.push_back({m - half, m + half});
      const std::size_t per_axis = np.mean.size() == 1 ? grid.nodes_1d : grid.nodes_2d;
      const std::vector<std::size_t> nodes(np.mean.size(), per_axis);
      return power_grid_posterior(model, sample, beta_n, box, nodes);
    }
  }
  throw ArgumentError("unknown model");
}

CriterionValue bpic(const ModelSpec& model, const ObservedSample& sample, const PowerPosterior& post) {
  require_untempered(post, "BPIC");
  const double n = static_cast<double>(sample.size());
  const double value = -2.0 * expected_avg_loglik(model, sample, post) +
                       2.0 * static_cast<double>(model.dim()) / n;
  return {CriterionKind::BPIC, sample.size(), 1.0, value, method_of(post)};
}

CriterionValue dic(const ModelSpec& model, const ObservedSample& sample, const PowerPosterior& post) {
  require_untempered(post, "DIC");
  const Theta mean = posterior_mean(post);
  if (!model.in_parameter_space(mean)) {
    throw DomainError("DIC: posterior mean lies outside the parameter space");
  }
  const double value =
      -4.0 * expected_avg_loglik(model, sample, post) + 2.0 * avg_loglik(model, sample, mean);
  return {CriterionKind::DIC, sample.size(), 1.0, value, method_of(post)};
}

CriterionValue wbic(const ModelSpec& model, const ObservedSample& sample, const PowerPosterior& post) {
  const double value = -2.0 * expected_avg_loglik(model, sample, post);
  return {CriterionKind::WBIC, sample.size(), post.temperature().value_or(1.0), value,
          method_of(post)};
}

CriterionValue wbic(const ModelSpec& model, const ObservedSample& sample, double beta_n,
                    const GridOptions& grid) {
  return wbic(model, sample, power_posterior_for(model, sample, beta_n, grid));
}

CriterionValue wbic(const ModelSpec& model, const ObservedSample& sample, BetaSchedule schedule,
                    const GridOptions& grid) {
  return wbic(model, sample, schedule.evaluate(sample.size()), grid);
}

CriterionValue dic_geometric_exact(double alpha, double beta, std::uint64_t n, double xbar) {
  if (n < 1) throw ArgumentError("dic_geometric_exact: n must be >= 1");
  if (!(xbar >= 0.0)) throw ArgumentError("dic_geometric_exact: xbar must be >= 0");
  const double nd = static_cast<double>(n);
  const double a = nd + alpha;
  const double b = nd * xbar + beta;
  const double psi_ab = digamma(a + b);
  const double expected = xbar * (digamma(b) - psi_ab) + digamma(a) - psi_ab;
  const double plug_in = xbar * std::log(b / (a + b)) + std::log(a / (a + b));
  return {CriterionKind::DIC, n, 1.0, -4.0 * expected + 2.0 * plug_in, Method::ClosedForm};
}

CriterionValue dic_geometric_approx(double alpha, double beta, std::uint64_t n, double xbar) {
  if (n < 1) throw ArgumentError("dic_geometric_approx: n must be >= 1");
  if (!(xbar >= 0.0)) throw ArgumentError("dic_geometric_approx: xbar must be >= 0");
  const double nd = static_cast<double>(n);
  const double a = nd + alpha;
  const double b = nd * xbar + beta;
  if (!(b > 0.0)) throw DomainError("dic_geometric_approx: n xbar + beta must be > 0");
  const double ab = a + b;
  const double value = -2.0 * std::log(a / ab) + 2.0 * b / (a * ab) -
                       2.0 * xbar * std::log(b / ab) + 2.0 * a * xbar / (b * ab);
  return {CriterionKind::DIC, n, 1.0, value, Method::PoincareApprox};
}

CriterionValue laplace_criteria(const ModelSpec& model, const ObservedSample& sample,
                                CriterionKind which, double beta_n, std::size_t nodes_per_axis) {
  if (model.kind() != ModelKind::Laplace) throw ArgumentError("laplace_criteria needs a Laplace model");
  if (sample.cols() != 1) throw ArgumentError("laplace_criteria needs a scalar sample");
  GridOptions grid;
  grid.nodes_2d = nodes_per_axis;
  switch (which) {
    case CriterionKind::DIC:
      return dic(model, sample, quadrature_posterior_for(model, sample, 1.0, grid));
    case CriterionKind::BPIC:
      return bpic(model, sample, quadrature_posterior_for(model, sample, 1.0, grid));
    case CriterionKind::WBIC:
      return wbic(model, sample, quadrature_posterior_for(model, sample, beta_n, grid));
  }
  throw ArgumentError("unknown criterion");
}

CriterionValue laplace_criteria(const ModelSpec& model, const ObservedSample& sample,
                                CriterionKind which, BetaSchedule schedule,
                                std::size_t nodes_per_axis) {
  const double beta_n = which == CriterionKind::WBIC ? schedule.evaluate(sample.size()) : 1.0;
  return laplace_criteria(model, sample, which, beta_n, nodes_per_axis);
}

double rescale_to_n(CriterionKind kind, std::uint64_t n, double value) {
  const double nd = static_cast<double>(n);
  return kind == CriterionKind::WBIC ? value * nd / 2.0 : value * nd;
}

}  // namespace bayesic
