#include "bayesic/posterior.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "bayesic/errors.hpp"
#include "bayesic/kernels.hpp"
#include "bayesic/specfun.hpp"

namespace bayesic {
namespace {

double uniform_open(std::mt19937_64& rng) {
  for (;;) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

void require_center_dim(std::span<const double> center, std::size_t dim) {
  if (center.size() != dim) {
    throw ArgumentError("center has dimension " + std::to_string(center.size()) +
                        ", posterior has " + std::to_string(dim));
  }
}

double clamp_unit(double p) { return std::clamp(p, 0.0, 1.0); }

double normal_ball_mass(const NormalPosterior& post, std::span<const double> center, double eps) {
  const double sd = std::sqrt(post.variance);
  const std::size_t p = post.mean.size();
  if (p == 1) {
    const double lo = (center[0] - eps - post.mean[0]) / sd;
    const double hi = (center[0] + eps - post.mean[0]) / sd;
    return clamp_unit(1.0 - normal_cdf(lo) - normal_ccdf(hi));
  }
  // ||theta - c||^2 / v is noncentral chi-square with p degrees of freedom
  // and noncentrality ||m - c||^2 / v.
  double dist_sq = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    const double d = post.mean[j] - center[j];
    dist_sq += d * d;
  }
  const double dist = std::sqrt(dist_sq);
  const double spread = (std::sqrt(static_cast<double>(p)) + 40.0) * sd;
  if (dist - eps > spread) return 0.0;
  if (eps - dist > spread) return 1.0;
  const double x = eps * eps / post.variance;
  const double lambda = dist_sq / post.variance;
  const double dof = static_cast<double>(p);
  if (lambda == 0.0) return clamp_unit(boost::math::cdf(boost::math::chi_squared(dof), x));
  return clamp_unit(boost::math::cdf(boost::math::non_central_chi_squared(dof, lambda), x));
}

double grid_expect(const GridPosterior& grid, const Functional& g) {
  switch (g.kind()) {
    case Functional::Kind::Coordinate:
      if (g.index() >= grid.dim()) throw ArgumentError("functional coordinate out of range");
      return kernels::dot(grid.weights, grid.coords[g.index()]);
    case Functional::Kind::SquaredCoordinate: {
      if (g.index() >= grid.dim()) throw ArgumentError("functional coordinate out of range");
      const auto& c = grid.coords[g.index()];
      double acc = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) acc += grid.weights[i] * c[i] * c[i];
      return acc;
    }
    default:
      break;
  }
  std::vector<double> node(grid.dim());
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.weights[i] == 0.0) continue;
    grid.node(i, node);
    acc += grid.weights[i] * g(node);
  }
  return acc;
}

double beta_expect(const BetaPosterior& beta, const Functional& g) {
  const double a = beta.a;
  const double b = beta.b;
  if (g.kind() != Functional::Kind::Custom && g.index() != 0) {
    throw ArgumentError("Beta posterior has a single coordinate");
  }
  switch (g.kind()) {
    case Functional::Kind::Coordinate:
      return a / (a + b);
    case Functional::Kind::SquaredCoordinate:
    case Functional::Kind::SquaredNorm:
      return a * (a + 1.0) / ((a + b) * (a + b + 1.0));
    case Functional::Kind::LogTheta:
      return digamma(a) - digamma(a + b);
    case Functional::Kind::LogOneMinusTheta:
      return digamma(b) - digamma(a + b);
    case Functional::Kind::Custom:
      break;
  }
  throw UnsupportedFunctionalError("arbitrary functionals require a grid posterior");
}

double normal_expect(const NormalPosterior& normal, const Functional& g) {
  const std::size_t p = normal.mean.size();
  switch (g.kind()) {
    case Functional::Kind::Coordinate:
      if (g.index() >= p) throw ArgumentError("functional coordinate out of range");
      return normal.mean[g.index()];
    case Functional::Kind::SquaredCoordinate:
      if (g.index() >= p) throw ArgumentError("functional coordinate out of range");
      return normal.mean[g.index()] * normal.mean[g.index()] + normal.variance;
    case Functional::Kind::SquaredNorm: {
      double acc = 0.0;
      for (double m : normal.mean) acc += m * m;
      return acc + static_cast<double>(p) * normal.variance;
    }
    case Functional::Kind::LogTheta:
    case Functional::Kind::LogOneMinusTheta:
      throw UnsupportedFunctionalError("log functionals are undefined on a normal posterior");
    case Functional::Kind::Custom:
      break;
  }
  throw UnsupportedFunctionalError("arbitrary functionals require a grid posterior");
}

// Shared by gibbs_posterior and eta_rescaled_posterior so that k = 0 builds
// the identical kernel expression.
PowerPosterior tempered_grid(const ThetaFn& utility, double gamma_n, unsigned k, const Box& box,
                             std::span<const std::size_t> nodes_per_axis, const ThetaFn& log_prior) {
  if (!(gamma_n > 0.0) || !std::isfinite(gamma_n)) {
    throw ArgumentError("gamma_n must be finite and > 0");
  }
  auto kernel = [&](std::span<const double> theta) {
    const double t = gamma_n * utility(theta);
    double eta = t;
    if (k > 0) {
      const double t2 = t * t;
      for (unsigned i = 0; i < k; ++i) eta *= t2;
    }
    return log_prior ? eta + log_prior(theta) : eta;
  };
  return grid_posterior(kernel, box, nodes_per_axis);
}

}  // namespace

// BetaSchedule ----------------------------------------------------------------

BetaSchedule BetaSchedule::parse(std::string_view name) {
  for (BetaSchedule s : all()) {
    if (s.name() == name) return s;
  }
  throw ArgumentError("unknown schedule '" + std::string(name) + "'");
}

std::array<BetaSchedule, 6> BetaSchedule::all() {
  return {BetaSchedule(ScheduleKind::InvLogN),  BetaSchedule(ScheduleKind::InvLogLogN),
          BetaSchedule(ScheduleKind::One),      BetaSchedule(ScheduleKind::InvSqrtN),
          BetaSchedule(ScheduleKind::InvN),     BetaSchedule(ScheduleKind::InvNLogN)};
}

std::string_view BetaSchedule::name() const {
  switch (kind_) {
    case ScheduleKind::InvLogN:
      return "inv-log-n";
    case ScheduleKind::InvLogLogN:
      return "inv-log-log-n";
    case ScheduleKind::One:
      return "one";
    case ScheduleKind::InvSqrtN:
      return "inv-sqrt-n";
    case ScheduleKind::InvN:
      return "inv-n";
    case ScheduleKind::InvNLogN:
      return "inv-n-log-n";
  }
  return "unknown";
}

std::uint64_t BetaSchedule::n_min() const {
  switch (kind_) {
    case ScheduleKind::InvLogN:
    case ScheduleKind::InvN:
    case ScheduleKind::InvNLogN:
      return 2;
    case ScheduleKind::InvLogLogN:
      return 3;  // log log 2 < 0
    case ScheduleKind::One:
    case ScheduleKind::InvSqrtN:
      return 1;
  }
  return 1;
}

bool BetaSchedule::satisfies_growth() const {
  switch (kind_) {
    case ScheduleKind::InvLogN:
    case ScheduleKind::InvLogLogN:
    case ScheduleKind::One:
    case ScheduleKind::InvSqrtN:
      return true;
    case ScheduleKind::InvN:
    case ScheduleKind::InvNLogN:
      return false;
  }
  return false;
}

double BetaSchedule::evaluate(std::uint64_t n) const {
  if (n < n_min()) {
    throw ArgumentError("schedule " + std::string(name()) + " is undefined at n = " +
                        std::to_string(n) + " (minimum " + std::to_string(n_min()) + ")");
  }
  const double x = static_cast<double>(n);
  switch (kind_) {
    case ScheduleKind::InvLogN:
      return 1.0 / std::log(x);
    case ScheduleKind::InvLogLogN:
      return 1.0 / std::log(std::log(x));
    case ScheduleKind::One:
      return 1.0;
    case ScheduleKind::InvSqrtN:
      return 1.0 / std::sqrt(x);
    case ScheduleKind::InvN:
      return 1.0 / x;
    case ScheduleKind::InvNLogN:
      return 1.0 / (x * std::log(x));
  }
  return 1.0;
}

// Representations -------------------------------------------------------------

void GridPosterior::node(std::size_t i, std::span<double> out) const {
  for (std::size_t d = 0; d < coords.size(); ++d) out[d] = coords[d][i];
}

std::vector<double> GridPosterior::node(std::size_t i) const {
  std::vector<double> out(coords.size());
  node(i, out);
  return out;
}

PowerPosterior::PowerPosterior(Representation rep, std::optional<double> temperature)
    : rep_(std::move(rep)), temperature_(temperature) {
  if (const auto* b = beta()) {
    if (!(b->a > 0.0) || !(b->b > 0.0) || !std::isfinite(b->a) || !std::isfinite(b->b)) {
      throw ArgumentError("Beta posterior parameters must be finite and > 0");
    }
  } else if (const auto* n = normal()) {
    if (!(n->variance > 0.0) || n->mean.empty()) {
      throw ArgumentError("normal posterior needs a positive variance and non-empty mean");
    }
  }
}

std::size_t PowerPosterior::dim() const {
  if (beta()) return 1;
  if (const auto* n = normal()) return n->mean.size();
  return grid()->dim();
}

double Functional::operator()(std::span<const double> theta) const {
  switch (kind_) {
    case Kind::Coordinate:
      return theta[index_];
    case Kind::SquaredCoordinate:
      return theta[index_] * theta[index_];
    case Kind::LogTheta:
      return std::log(theta[0]);
    case Kind::LogOneMinusTheta:
      return std::log1p(-theta[0]);
    case Kind::SquaredNorm: {
      double acc = 0.0;
      for (double v : theta) acc += v * v;
      return acc;
    }
    case Kind::Custom:
      return fn_(theta);
  }
  return 0.0;
}

// Constructors ----------------------------------------------------------------

PowerPosterior geometric_power_posterior(double alpha, double beta, std::uint64_t n, double xbar,
                                         double beta_n) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw ArgumentError("prior parameters must be > 0");
  if (n < 1) throw ArgumentError("geometric_power_posterior: n must be >= 1");
  if (!(xbar >= 0.0) || !std::isfinite(xbar)) throw ArgumentError("xbar must be finite and >= 0");
  if (!(beta_n > 0.0) || !std::isfinite(beta_n)) throw ArgumentError("beta_n must be finite and > 0");
  const double weight = static_cast<double>(n) * beta_n;
  return PowerPosterior(BetaPosterior{weight + alpha, weight * xbar + beta}, beta_n);
}

PowerPosterior normal_power_posterior(std::span<const double> mu, std::uint64_t n,
                                      std::span<const double> xbar, double beta_n) {
  if (mu.size() != xbar.size() || mu.empty()) {
    throw ArgumentError("normal_power_posterior: prior mean and sample mean lengths differ");
  }
  if (!(beta_n > 0.0) || !std::isfinite(beta_n)) throw ArgumentError("beta_n must be finite and > 0");
  const double weight = static_cast<double>(n) * beta_n;
  const double denom = weight + 1.0;
  std::vector<double> mean(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) mean[j] = (weight * xbar[j] + mu[j]) / denom;
  return PowerPosterior(NormalPosterior{std::move(mean), 1.0 / denom}, beta_n);
}

PowerPosterior grid_posterior(const ThetaFn& log_kernel, const Box& box,
                              std::span<const std::size_t> nodes_per_axis) {
  const std::size_t dim = box.dim();
  if (dim == 0) throw ArgumentError("grid_posterior: empty box");
  if (nodes_per_axis.size() != dim) {
    throw ArgumentError("grid_posterior: need one node count per axis");
  }
  std::size_t total = 1;
  for (std::size_t d = 0; d < dim; ++d) {
    const auto& ax = box.axes[d];
    if (!std::isfinite(ax.lo) || !std::isfinite(ax.hi) || !(ax.hi > ax.lo)) {
      throw ArgumentError("grid_posterior: box axes must be finite with hi > lo");
    }
    if (nodes_per_axis[d] < kMinGridNodes) {
      throw ArgumentError("grid_posterior: at least " + std::to_string(kMinGridNodes) +
                          " nodes per axis are required");
    }
    total *= nodes_per_axis[d];
  }

  GridPosterior grid;
  grid.box = box;
  grid.nodes_per_axis.assign(nodes_per_axis.begin(), nodes_per_axis.end());
  grid.coords.assign(dim, std::vector<double>(total));

  // Row-major: the last axis varies fastest.
  std::vector<double> axis_step(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    axis_step[d] = box.axes[d].width() / static_cast<double>(nodes_per_axis[d]);
  }
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      grid.coords[d][i] = box.axes[d].lo + (static_cast<double>(idx[d]) + 0.5) * axis_step[d];
    }
    for (std::size_t d = dim; d-- > 0;) {
      if (++idx[d] < nodes_per_axis[d]) break;
      idx[d] = 0;
    }
  }

  std::vector<double> log_kernel_values(total);
  std::vector<double> node(dim);
  for (std::size_t i = 0; i < total; ++i) {
    grid.node(i, node);
    const double v = log_kernel(node);
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw ArgumentError("grid_posterior: log kernel is NaN or +inf at a node");
    }
    log_kernel_values[i] = v;
  }

  const double shift = kernels::max_value(log_kernel_values);
  if (shift == -std::numeric_limits<double>::infinity()) {
    throw DegenerateKernelError("grid_posterior: log kernel is -inf at every node");
  }
  grid.weights.resize(total);
  const double mass = kernels::exp_shifted(log_kernel_values, shift, grid.weights);
  kernels::scale(grid.weights, 1.0 / mass);
  const double log_norm = shift + std::log(mass);
  grid.log_weights.resize(total);
  for (std::size_t i = 0; i < total; ++i) grid.log_weights[i] = log_kernel_values[i] - log_norm;

  return PowerPosterior(std::move(grid));
}

PowerPosterior power_grid_posterior(const ModelSpec& model, const ObservedSample& sample,
                                    double beta_n, const Box& box,
                                    std::span<const std::size_t> nodes_per_axis) {
  if (!(beta_n > 0.0) || !std::isfinite(beta_n)) throw ArgumentError("beta_n must be finite and > 0");
  const AverageLoglik loglik(model, sample);
  const double weight = static_cast<double>(sample.size()) * beta_n;
  auto kernel = [&](std::span<const double> theta) {
    if (!model.in_parameter_space(theta)) return -std::numeric_limits<double>::infinity();
    return weight * loglik(theta) + model.log_prior(theta);
  };
  PowerPosterior post = grid_posterior(kernel, box, nodes_per_axis);
  post.set_temperature(beta_n);
  return post;
}

// Summaries -------------------------------------------------------------------

Theta posterior_mean(const PowerPosterior& post) {
  if (const auto* b = post.beta()) return Theta{b->a / (b->a + b->b)};
  if (const auto* n = post.normal()) return Theta(n->mean);
  const auto& grid = *post.grid();
  std::vector<double> mean(grid.dim());
  for (std::size_t d = 0; d < grid.dim(); ++d) mean[d] = kernels::dot(grid.weights, grid.coords[d]);
  return Theta(std::move(mean));
}

double posterior_expect(const PowerPosterior& post, const Functional& g) {
  if (const auto* b = post.beta()) return beta_expect(*b, g);
  if (const auto* n = post.normal()) return normal_expect(*n, g);
  return grid_expect(*post.grid(), g);
}

double ball_mass(const PowerPosterior& post, std::span<const double> center, double eps) {
  if (!(eps > 0.0)) throw ArgumentError("ball_mass: eps must be > 0");
  require_center_dim(center, post.dim());
  if (const auto* b = post.beta()) {
    // 1 - lower tail - upper tail keeps precision when the mass is near 1.
    const double lower = incomplete_beta(b->a, b->b, center[0] - eps);
    const double upper = incomplete_beta_complement(b->a, b->b, center[0] + eps);
    return clamp_unit(1.0 - lower - upper);
  }
  if (const auto* n = post.normal()) return normal_ball_mass(*n, center, eps);

  const auto& grid = *post.grid();
  if (grid.dim() == 1) {
    // Each midpoint cell contributes the fraction of its width inside the interval.
    const double h = grid.box.axes[0].width() / static_cast<double>(grid.size());
    const double lo = center[0] - eps;
    const double hi = center[0] + eps;
    double mass = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.coords[0][i];
      const double overlap = std::min(hi, x + 0.5 * h) - std::max(lo, x - 0.5 * h);
      if (overlap > 0.0) mass += grid.weights[i] * std::min(1.0, overlap / h);
    }
    return clamp_unit(mass);
  }
  const double eps_sq = eps * eps;
  double mass = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double dist_sq = 0.0;
    for (std::size_t d = 0; d < grid.dim(); ++d) {
      const double diff = grid.coords[d][i] - center[d];
      dist_sq += diff * diff;
    }
    if (dist_sq <= eps_sq) mass += grid.weights[i];
  }
  return clamp_unit(mass);
}

PowerPosterior gibbs_posterior(const ThetaFn& utility, double gamma_n, const Box& box,
                               std::span<const std::size_t> nodes_per_axis,
                               const ThetaFn& log_prior) {
  return tempered_grid(utility, gamma_n, 0, box, nodes_per_axis, log_prior);
}

PowerPosterior eta_rescaled_posterior(const ThetaFn& utility, double gamma_n, unsigned k,
                                      const Box& box, std::span<const std::size_t> nodes_per_axis,
                                      const ThetaFn& log_prior) {
  return tempered_grid(utility, gamma_n, k, box, nodes_per_axis, log_prior);
}

std::vector<std::pair<double, double>> aui_tail_diagnostic(const PowerPosterior& post,
                                                           const ThetaFn& f,
                                                           std::span<const double> deltas) {
  const auto* grid = post.grid();
  if (grid == nullptr) throw ArgumentError("aui_tail_diagnostic requires a grid posterior");
  std::vector<double> abs_f(grid->size());
  std::vector<double> node(grid->dim());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    grid->node(i, node);
    abs_f[i] = std::fabs(f(node));
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(deltas.size());
  for (double delta : deltas) {
    if (!(delta > 0.0)) throw ArgumentError("aui_tail_diagnostic: deltas must be > 0");
    double tail = 0.0;
    for (std::size_t i = 0; i < abs_f.size(); ++i) {
      if (abs_f[i] >= delta) tail += abs_f[i] * grid->weights[i];
    }
    out.emplace_back(delta, tail);
  }
  return out;
}

QuasiconcavityResult quasiconcavity_check(const ThetaFn& f, const Box& box, std::size_t n_triples,
                                          double tol, std::uint64_t seed) {
  const std::size_t dim = box.dim();
  if (dim == 0) throw ArgumentError("quasiconcavity_check: empty box");
  std::mt19937_64 rng(seed);
  QuasiconcavityResult result;
  std::vector<double> theta(dim), tau(dim), mix(dim);
  for (std::size_t t = 0; t < n_triples; ++t) {
    for (std::size_t d = 0; d < dim; ++d) {
      theta[d] = box.axes[d].lo + uniform_open(rng) * box.axes[d].width();
      tau[d] = box.axes[d].lo + uniform_open(rng) * box.axes[d].width();
    }
    const double lambda = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    for (std::size_t d = 0; d < dim; ++d) mix[d] = lambda * theta[d] + (1.0 - lambda) * tau[d];
    const double f_mix = f(mix);
    const double f_min = std::min(f(theta), f(tau));
    ++result.triples_checked;
    if (f_mix < f_min - tol) {
      result.passed = false;
      result.counterexample = QuasiconcavityWitness{theta, tau, lambda, f_mix, f_min};
      return result;
    }
  }
  return result;
}

}  // namespace bayesic
