#include "bayesic/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bayesic/errors.hpp"
#include "bayesic/kernels.hpp"
#include "bayesic/specfun.hpp"

namespace bayesic {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dim(std::span<const double> theta, std::size_t dim, const char* what) {
  if (theta.size() != dim) {
    throw ArgumentError(std::string(what) + ": expected parameter of dimension " +
                        std::to_string(dim) + ", got " + std::to_string(theta.size()));
  }
}

void require_in_space(const ModelSpec& model, std::span<const double> theta, const char* what) {
  require_dim(theta, model.dim(), what);
  if (!model.in_parameter_space(theta)) {
    throw DomainError(std::string(what) + ": parameter outside the " +
                      std::string(to_string(model.kind())) + " parameter space");
  }
}

bool is_nonneg_integer(double x) { return x >= 0.0 && std::isfinite(x) && x == std::floor(x); }

void require_same_family(const ModelSpec& model, const DataGeneratingProcess& dgp, const char* what) {
  if (model.kind() != dgp.kind()) {
    throw ArgumentError(std::string(what) + ": data-generating family " +
                        std::string(to_string(dgp.kind())) + " does not match model " +
                        std::string(to_string(model.kind())));
  }
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Geometric:
      return "geometric";
    case ModelKind::Normal:
      return "normal";
    case ModelKind::Laplace:
      return "laplace";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "geometric") return ModelKind::Geometric;
  if (name == "normal") return ModelKind::Normal;
  if (name == "laplace") return ModelKind::Laplace;
  throw ArgumentError("unknown model '" + std::string(name) + "'");
}

bool Box::contains(std::span<const double> point) const {
  if (point.size() != axes.size()) return false;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (!(point[i] >= axes[i].lo && point[i] <= axes[i].hi)) return false;
  }
  return true;
}

double Box::diameter() const {
  double acc = 0.0;
  for (const auto& a : axes) acc += a.width() * a.width();
  return std::sqrt(acc);
}

// ModelSpec -----------------------------------------------------------------

ModelSpec ModelSpec::geometric(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw ArgumentError("geometric model: Beta prior parameters must be finite and > 0");
  }
  return ModelSpec(Geometric{alpha, beta});
}

ModelSpec ModelSpec::normal(std::vector<double> prior_mean) {
  if (prior_mean.empty()) throw ArgumentError("normal model: dimension must be >= 1");
  for (double v : prior_mean) {
    if (!std::isfinite(v)) throw ArgumentError("normal model: prior mean must be finite");
  }
  return ModelSpec(Normal{std::move(prior_mean)});
}

ModelSpec ModelSpec::laplace(double m, double s, LogDensityFn log_prior) {
  if (!(m > 0.0) || !std::isfinite(m)) throw ArgumentError("laplace model: m must be finite and > 0");
  if (!(s > 1.0) || !std::isfinite(s)) throw ArgumentError("laplace model: s must be finite and > 1");
  return ModelSpec(Laplace{m, s, std::move(log_prior)});
}

ModelKind ModelSpec::kind() const {
  return std::visit(Overloaded{[](const Geometric&) { return ModelKind::Geometric; },
                               [](const Normal&) { return ModelKind::Normal; },
                               [](const Laplace&) { return ModelKind::Laplace; }},
                    family_);
}

std::size_t ModelSpec::dim() const {
  return std::visit(Overloaded{[](const Geometric&) -> std::size_t { return 1; },
                               [](const Normal& n) -> std::size_t { return n.prior_mean.size(); },
                               [](const Laplace&) -> std::size_t { return 2; }},
                    family_);
}

std::size_t ModelSpec::obs_dim() const { return kind() == ModelKind::Normal ? dim() : 1; }

double ModelSpec::alpha() const {
  if (const auto* g = std::get_if<Geometric>(&family_)) return g->alpha;
  throw ArgumentError("alpha is only defined for the geometric model");
}

double ModelSpec::beta() const {
  if (const auto* g = std::get_if<Geometric>(&family_)) return g->beta;
  throw ArgumentError("beta is only defined for the geometric model");
}

const std::vector<double>& ModelSpec::prior_mean() const {
  if (const auto* n = std::get_if<Normal>(&family_)) return n->prior_mean;
  throw ArgumentError("prior_mean is only defined for the normal model");
}

double ModelSpec::box_m() const {
  if (const auto* l = std::get_if<Laplace>(&family_)) return l->m;
  throw ArgumentError("box_m is only defined for the laplace model");
}

double ModelSpec::box_s() const {
  if (const auto* l = std::get_if<Laplace>(&family_)) return l->s;
  throw ArgumentError("box_s is only defined for the laplace model");
}

Box ModelSpec::parameter_box() const {
  return std::visit(
      Overloaded{[](const Geometric&) { return Box{{{0.0, 1.0}}}; },
                 [](const Normal&) -> Box {
                   throw ArgumentError("normal parameter space is unbounded; supply a box");
                 },
                 [](const Laplace& l) { return Box{{{-l.m, l.m}, {1.0 / l.s, l.s}}}; }},
      family_);
}

bool ModelSpec::in_parameter_space(std::span<const double> theta) const {
  if (theta.size() != dim()) return false;
  return std::visit(
      Overloaded{[&](const Geometric&) { return theta[0] > 0.0 && theta[0] < 1.0; },
                 [&](const Normal&) {
                   return std::all_of(theta.begin(), theta.end(),
                                      [](double v) { return std::isfinite(v); });
                 },
                 [&](const Laplace& l) {
                   return theta[0] >= -l.m && theta[0] <= l.m && theta[1] >= 1.0 / l.s &&
                          theta[1] <= l.s;
                 }},
      family_);
}

double ModelSpec::log_prior(std::span<const double> theta) const {
  require_dim(theta, dim(), "log_prior");
  return std::visit(
      Overloaded{[&](const Geometric& g) {
                   const double t = theta[0];
                   return (g.alpha - 1.0) * std::log(t) + (g.beta - 1.0) * std::log1p(-t) -
                          log_beta_function(g.alpha, g.beta);
                 },
                 [&](const Normal& n) {
                   double q = 0.0;
                   for (std::size_t j = 0; j < theta.size(); ++j) {
                     const double d = theta[j] - n.prior_mean[j];
                     q += d * d;
                   }
                   return -0.5 * static_cast<double>(theta.size()) * kLog2Pi - 0.5 * q;
                 },
                 [&](const Laplace& l) {
                   if (l.log_prior) return l.log_prior(theta);
                   return -std::log(2.0 * l.m * (l.s - 1.0 / l.s));
                 }},
      family_);
}

// AbsDevTable -----------------------------------------------------------------

AbsDevTable::AbsDevTable(std::span<const double> values)
    : sorted_(values.begin(), values.end()), prefix_(values.size() + 1, 0.0) {
  std::sort(sorted_.begin(), sorted_.end());
  for (std::size_t i = 0; i < sorted_.size(); ++i) prefix_[i + 1] = prefix_[i] + sorted_[i];
}

double AbsDevTable::operator()(double center) const {
  const auto below = static_cast<std::size_t>(
      std::lower_bound(sorted_.begin(), sorted_.end(), center) - sorted_.begin());
  const double n_below = static_cast<double>(below);
  const double n_above = static_cast<double>(sorted_.size() - below);
  const double sum_below = prefix_[below];
  const double sum_above = prefix_.back() - sum_below;
  return (n_below * center - sum_below) + (sum_above - n_above * center);
}

// ObservedSample --------------------------------------------------------------

ObservedSample::ObservedSample(std::vector<double> values, std::size_t cols)
    : values_(std::move(values)), cols_(cols) {
  if (cols_ == 0) throw ArgumentError("sample: column count must be >= 1");
  if (values_.empty()) throw ArgumentError("sample: at least one observation is required");
  if (values_.size() % cols_ != 0) throw ArgumentError("sample: ragged rows");
  n_ = values_.size() / cols_;

  for (double v : values_) {
    if (!std::isfinite(v)) throw ArgumentError("sample: non-finite observation");
    if (!is_nonneg_integer(v)) nonneg_integers_ = false;
  }

  mean_.assign(cols_, 0.0);
  if (cols_ == 1) {
    mean_[0] = kernels::sum(values_) / static_cast<double>(n_);
  } else {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) mean_[j] += values_[i * cols_ + j];
    }
    for (double& m : mean_) m /= static_cast<double>(n_);
  }
  sum_sq_ = kernels::sum_sq(values_);
}

double ObservedSample::sum_abs_dev(double center) const {
  if (cols_ != 1) throw ArgumentError("sum_abs_dev requires a scalar sample");
  return kernels::sum_abs_dev(values_, center);
}

AbsDevTable ObservedSample::abs_dev_table() const {
  if (cols_ != 1) throw ArgumentError("abs_dev_table requires a scalar sample");
  return AbsDevTable(values_);
}

// DataGeneratingProcess -------------------------------------------------------

DataGeneratingProcess DataGeneratingProcess::geometric(double theta0) {
  if (!(theta0 > 0.0 && theta0 < 1.0)) throw ArgumentError("geometric DGP: theta0 must lie in (0, 1)");
  return DataGeneratingProcess(ModelKind::Geometric, {theta0});
}

DataGeneratingProcess DataGeneratingProcess::normal(std::vector<double> mean) {
  if (mean.empty()) throw ArgumentError("normal DGP: mean must be non-empty");
  for (double v : mean) {
    if (!std::isfinite(v)) throw ArgumentError("normal DGP: mean must be finite");
  }
  return DataGeneratingProcess(ModelKind::Normal, std::move(mean));
}

DataGeneratingProcess DataGeneratingProcess::laplace(double location, double scale) {
  if (!std::isfinite(location)) throw ArgumentError("laplace DGP: location must be finite");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ArgumentError("laplace DGP: scale must be > 0");
  return DataGeneratingProcess(ModelKind::Laplace, {location, scale});
}

double DataGeneratingProcess::geometric_theta() const {
  if (kind_ != ModelKind::Geometric) throw ArgumentError("not a geometric DGP");
  return params_[0];
}

const std::vector<double>& DataGeneratingProcess::normal_mean() const {
  if (kind_ != ModelKind::Normal) throw ArgumentError("not a normal DGP");
  return params_;
}

double DataGeneratingProcess::laplace_location() const {
  if (kind_ != ModelKind::Laplace) throw ArgumentError("not a laplace DGP");
  return params_[0];
}

double DataGeneratingProcess::laplace_scale() const {
  if (kind_ != ModelKind::Laplace) throw ArgumentError("not a laplace DGP");
  return params_[1];
}

double DataGeneratingProcess::expectation() const {
  switch (kind_) {
    case ModelKind::Geometric:
      return (1.0 - params_[0]) / params_[0];
    case ModelKind::Laplace:
      return params_[0];
    case ModelKind::Normal:
      if (params_.size() == 1) return params_[0];
      throw ArgumentError("expectation() is scalar; use normal_mean() for p > 1");
  }
  return 0.0;
}

double DataGeneratingProcess::expected_sq_norm() const {
  return sq_norm_of_mean() + static_cast<double>(normal_mean().size());
}

double DataGeneratingProcess::sq_norm_of_mean() const {
  double acc = 0.0;
  for (double v : normal_mean()) acc += v * v;
  return acc;
}

// Likelihoods -----------------------------------------------------------------

double log_density(const ModelSpec& model, std::span<const double> x, std::span<const double> theta) {
  require_in_space(model, theta, "log_density");
  if (x.size() != model.obs_dim()) {
    throw ArgumentError("log_density: observation has " + std::to_string(x.size()) +
                        " columns, model expects " + std::to_string(model.obs_dim()));
  }
  switch (model.kind()) {
    case ModelKind::Geometric:
      if (!is_nonneg_integer(x[0])) {
        throw DomainError("log_density: geometric observations must be non-negative integers");
      }
      return x[0] * std::log1p(-theta[0]) + std::log(theta[0]);
    case ModelKind::Normal: {
      double q = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = x[j] - theta[j];
        q += d * d;
      }
      return -0.5 * static_cast<double>(x.size()) * kLog2Pi - 0.5 * q;
    }
    case ModelKind::Laplace:
      return -std::log(2.0 * theta[1]) - std::fabs(x[0] - theta[0]) / theta[1];
  }
  return 0.0;
}

namespace {

double geometric_avg(const ObservedSample& sample, double t) {
  return sample.mean()[0] * std::log1p(-t) + std::log(t);
}

double normal_avg(const ObservedSample& sample, std::span<const double> theta) {
  const auto& xbar = sample.mean();
  double cross = 0.0;
  double norm = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    cross += xbar[j] * theta[j];
    norm += theta[j] * theta[j];
  }
  const double n = static_cast<double>(sample.size());
  return -0.5 * static_cast<double>(theta.size()) * kLog2Pi -
         0.5 * (sample.sum_sq() / n - 2.0 * cross + norm);
}

double laplace_avg(double abs_dev_sum, std::size_t n, std::span<const double> theta) {
  return -std::log(2.0 * theta[1]) - abs_dev_sum / (theta[1] * static_cast<double>(n));
}

void require_sample_fits(const ModelSpec& model, const ObservedSample& sample) {
  if (sample.cols() != model.obs_dim()) {
    throw ArgumentError("sample has " + std::to_string(sample.cols()) + " columns, model expects " +
                        std::to_string(model.obs_dim()));
  }
  if (model.kind() == ModelKind::Geometric && !sample.nonneg_integers()) {
    throw DomainError("geometric observations must be non-negative integers");
  }
}

}  // namespace

double avg_loglik(const ModelSpec& model, const ObservedSample& sample, std::span<const double> theta) {
  require_in_space(model, theta, "avg_loglik");
  require_sample_fits(model, sample);
  switch (model.kind()) {
    case ModelKind::Geometric:
      return geometric_avg(sample, theta[0]);
    case ModelKind::Normal:
      return normal_avg(sample, theta);
    case ModelKind::Laplace:
      return laplace_avg(sample.sum_abs_dev(theta[0]), sample.size(), theta);
  }
  return 0.0;
}

double expected_loglik(const ModelSpec& model, const DataGeneratingProcess& dgp,
                       std::span<const double> theta) {
  require_same_family(model, dgp, "expected_loglik");
  require_in_space(model, theta, "expected_loglik");
  switch (model.kind()) {
    case ModelKind::Geometric:
      return dgp.expectation() * std::log1p(-theta[0]) + std::log(theta[0]);
    case ModelKind::Normal: {
      const auto& mean = dgp.normal_mean();
      if (mean.size() != theta.size()) throw ArgumentError("expected_loglik: dimension mismatch");
      double cross = 0.0;
      double norm = 0.0;
      for (std::size_t j = 0; j < theta.size(); ++j) {
        cross += mean[j] * theta[j];
        norm += theta[j] * theta[j];
      }
      return -0.5 * static_cast<double>(theta.size()) * kLog2Pi -
             0.5 * (dgp.expected_sq_norm() - 2.0 * cross + norm);
    }
    case ModelKind::Laplace: {
      const double b = dgp.laplace_scale();
      const double d = std::fabs(theta[0] - dgp.laplace_location());
      const double mean_abs = b * std::exp(-d / b) + d;
      return -std::log(2.0 * theta[1]) - mean_abs / theta[1];
    }
  }
  return 0.0;
}

Theta true_theta0(const ModelSpec& model, const DataGeneratingProcess& dgp) {
  require_same_family(model, dgp, "true_theta0");
  switch (model.kind()) {
    case ModelKind::Geometric:
      return Theta{1.0 / (1.0 + dgp.expectation())};
    case ModelKind::Normal:
      if (dgp.normal_mean().size() != model.dim()) {
        throw ArgumentError("true_theta0: dimension mismatch");
      }
      return Theta(dgp.normal_mean());
    case ModelKind::Laplace: {
      // Median of a Laplace law is its location; mean absolute deviation
      // about the median is its scale.
      Theta t{dgp.laplace_location(), dgp.laplace_scale()};
      if (!model.in_parameter_space(t)) {
        throw ConfigurationError("true_theta0: Laplace maximizer lies outside [-m, m] x [1/s, s]");
      }
      return t;
    }
  }
  return {};
}

// AverageLoglik ---------------------------------------------------------------

AverageLoglik::AverageLoglik(const ModelSpec& model, const ObservedSample& sample)
    : model_(&model), sample_(&sample) {
  require_sample_fits(model, sample);
  if (model.kind() == ModelKind::Laplace) table_.emplace(sample.abs_dev_table());
}

double AverageLoglik::operator()(std::span<const double> theta) const {
  require_in_space(*model_, theta, "avg_loglik");
  switch (model_->kind()) {
    case ModelKind::Geometric:
      return geometric_avg(*sample_, theta[0]);
    case ModelKind::Normal:
      return normal_avg(*sample_, theta);
    case ModelKind::Laplace:
      return laplace_avg((*table_)(theta[0]), sample_->size(), theta);
  }
  return 0.0;
}

}  // namespace bayesic
