#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "bayesic/models.hpp"

namespace bayesic {

using ThetaFn = std::function<double(std::span<const double>)>;

enum class ScheduleKind { InvLogN, InvLogLogN, One, InvSqrtN, InvN, InvNLogN };

/// Temperature sequence beta_n for power posteriors.
class BetaSchedule {
 public:
  constexpr explicit BetaSchedule(ScheduleKind kind) : kind_(kind) {}

  static BetaSchedule parse(std::string_view name);
  static std::array<BetaSchedule, 6> all();

  ScheduleKind kind() const { return kind_; }
  // "inv-log-n", "inv-log-log-n", "one", "inv-sqrt-n", "inv-n", "inv-n-log-n"
  std::string_view name() const;
  // Smallest n at which evaluate(n) is defined and positive.
  std::uint64_t n_min() const;
  // True exactly when n * beta_n diverges.
  bool satisfies_growth() const;
  // Throws ArgumentError for n < n_min().
  double evaluate(std::uint64_t n) const;

  friend bool operator==(BetaSchedule, BetaSchedule) = default;

 private:
  ScheduleKind kind_;
};

struct BetaPosterior {
  double a;
  double b;
};

struct NormalPosterior {
  std::vector<double> mean;
  double variance;
};

/// Tensor-product midpoint grid with normalized weights. Coordinates are
/// stored per axis (coords[d][i] is coordinate d of node i) so weighted
/// moments are plain dot products.
struct GridPosterior {
  Box box;
  std::vector<std::size_t> nodes_per_axis;
  std::vector<std::vector<double>> coords;
  std::vector<double> log_weights;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::size_t dim() const { return coords.size(); }
  void node(std::size_t i, std::span<double> out) const;
  std::vector<double> node(std::size_t i) const;
};

class PowerPosterior {
 public:
  using Representation = std::variant<BetaPosterior, NormalPosterior, GridPosterior>;

  explicit PowerPosterior(Representation rep, std::optional<double> temperature = std::nullopt);

  const Representation& representation() const { return rep_; }
  const BetaPosterior* beta() const { return std::get_if<BetaPosterior>(&rep_); }
  const NormalPosterior* normal() const { return std::get_if<NormalPosterior>(&rep_); }
  const GridPosterior* grid() const { return std::get_if<GridPosterior>(&rep_); }

  // beta_n used to build the posterior, when known.
  std::optional<double> temperature() const { return temperature_; }
  void set_temperature(double beta_n) { temperature_ = beta_n; }

  std::size_t dim() const;

 private:
  Representation rep_;
  std::optional<double> temperature_;
};

/// Functional g(theta) whose posterior expectation is requested. The registered
/// kinds have exact formulas on closed-form posteriors; Custom only works on
/// grids.
class Functional {
 public:
  enum class Kind { Coordinate, SquaredCoordinate, LogTheta, LogOneMinusTheta, SquaredNorm, Custom };

  static Functional coordinate(std::size_t j = 0) { return Functional(Kind::Coordinate, j); }
  static Functional squared_coordinate(std::size_t j = 0) {
    return Functional(Kind::SquaredCoordinate, j);
  }
  static Functional log_theta() { return Functional(Kind::LogTheta, 0); }
  static Functional log_one_minus_theta() { return Functional(Kind::LogOneMinusTheta, 0); }
  static Functional squared_norm() { return Functional(Kind::SquaredNorm, 0); }
  static Functional custom(ThetaFn fn) {
    Functional f(Kind::Custom, 0);
    f.fn_ = std::move(fn);
    return f;
  }

  Kind kind() const { return kind_; }
  std::size_t index() const { return index_; }
  double operator()(std::span<const double> theta) const;

 private:
  Functional(Kind kind, std::size_t index) : kind_(kind), index_(index) {}

  Kind kind_;
  std::size_t index_;
  ThetaFn fn_;
};

// Beta(n beta_n + alpha, n beta_n xbar + beta).
PowerPosterior geometric_power_posterior(double alpha, double beta, std::uint64_t n, double xbar,
                                         double beta_n);

// N(m, v I), m = (n beta_n xbar + mu) / (n beta_n + 1), v = 1 / (n beta_n + 1).
PowerPosterior normal_power_posterior(std::span<const double> mu, std::uint64_t n,
                                      std::span<const double> xbar, double beta_n);

inline constexpr std::size_t kMinGridNodes = 16;

/// Midpoint grid over `box` with weights proportional to exp(log_kernel).
/// Nodes where the kernel is -inf get zero weight; NaN or +inf is rejected.
/// Throws DegenerateKernelError when every node is -inf.
PowerPosterior grid_posterior(const ThetaFn& log_kernel, const Box& box,
                              std::span<const std::size_t> nodes_per_axis);

/// Grid power posterior for `model`: kernel n beta_n avg_loglik + log prior.
PowerPosterior power_grid_posterior(const ModelSpec& model, const ObservedSample& sample,
                                    double beta_n, const Box& box,
                                    std::span<const std::size_t> nodes_per_axis);

Theta posterior_mean(const PowerPosterior& post);

double posterior_expect(const PowerPosterior& post, const Functional& g);

/// Posterior mass of the closed Euclidean ball of radius eps about `center`.
double ball_mass(const PowerPosterior& post, std::span<const double> center, double eps);

/// Generalized posterior proportional to exp(gamma_n u_n(theta)) times the
/// prior (uniform on the box when log_prior is empty).
PowerPosterior gibbs_posterior(const ThetaFn& utility, double gamma_n, const Box& box,
                               std::span<const std::size_t> nodes_per_axis,
                               const ThetaFn& log_prior = {});

/// As gibbs_posterior with the exponent replaced by eta(gamma_n u_n) where
/// eta(x) = x^(2k+1). k = 0 reproduces gibbs_posterior bit for bit.
PowerPosterior eta_rescaled_posterior(const ThetaFn& utility, double gamma_n, unsigned k,
                                      const Box& box, std::span<const std::size_t> nodes_per_axis,
                                      const ThetaFn& log_prior = {});

/// Tail integrals sum_{|f| >= delta} |f(node)| w(node), one per delta.
std::vector<std::pair<double, double>> aui_tail_diagnostic(const PowerPosterior& post,
                                                           const ThetaFn& f,
                                                           std::span<const double> deltas);

struct QuasiconcavityWitness {
  std::vector<double> theta;
  std::vector<double> tau;
  double lambda;
  double value_at_mix;
  double min_endpoint_value;
};

struct QuasiconcavityResult {
  bool passed = true;
  std::size_t triples_checked = 0;
  std::optional<QuasiconcavityWitness> counterexample;
};

/// Samples random (theta, tau, lambda) in the box and checks
/// f(lambda theta + (1 - lambda) tau) >= min(f(theta), f(tau)) - tol.
/// Sampled points stay in the open interior of the box.
QuasiconcavityResult quasiconcavity_check(const ThetaFn& f, const Box& box, std::size_t n_triples,
                                          double tol, std::uint64_t seed = 0x5eed);

}  // namespace bayesic
