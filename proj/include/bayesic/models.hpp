#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace bayesic {

enum class ModelKind { Geometric, Normal, Laplace };

std::string_view to_string(ModelKind kind);
// Accepts "geometric", "normal", "laplace". Throws ArgumentError otherwise.
ModelKind parse_model_kind(std::string_view name);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
};

/// Axis-aligned box, one closed interval per parameter coordinate.
struct Box {
  std::vector<Interval> axes;

  std::size_t dim() const { return axes.size(); }
  bool contains(std::span<const double> point) const;
  double diameter() const;
};

/// Log prior density, evaluated at a parameter vector.
using LogDensityFn = std::function<double(std::span<const double>)>;

/// One of the three likelihood families together with its prior.
///
/// Geometric: PMF (1 - theta)^x theta on x = 0, 1, 2, ..., theta in (0, 1),
///   Beta(alpha, beta) prior.
/// Normal: N_p(theta, I) likelihood, N_p(prior_mean, I) prior, theta in R^p.
/// Laplace: density exp(-|x - mu| / gamma) / (2 gamma) with
///   (mu, gamma) in [-m, m] x [1/s, s]; uniform prior unless overridden.
class ModelSpec {
 public:
  static ModelSpec geometric(double alpha = 1.0, double beta = 1.0);
  static ModelSpec normal(std::vector<double> prior_mean);
  static ModelSpec laplace(double m, double s, LogDensityFn log_prior = {});

  ModelKind kind() const;
  // Parameter dimension (the p of the 2p/n BPIC penalty).
  std::size_t dim() const;
  // Columns per observation.
  std::size_t obs_dim() const;

  double alpha() const;
  double beta() const;
  const std::vector<double>& prior_mean() const;
  double box_m() const;
  double box_s() const;

  // Compact box used for quadrature: [0, 1] for geometric, the Laplace box.
  // Throws ArgumentError for the normal model (unbounded space).
  Box parameter_box() const;
  bool in_parameter_space(std::span<const double> theta) const;
  double log_prior(std::span<const double> theta) const;

 private:
  struct Geometric {
    double alpha;
    double beta;
  };
  struct Normal {
    std::vector<double> prior_mean;
  };
  struct Laplace {
    double m;
    double s;
    LogDensityFn log_prior;
  };

  explicit ModelSpec(std::variant<Geometric, Normal, Laplace> family) : family_(std::move(family)) {}

  std::variant<Geometric, Normal, Laplace> family_;
};

/// Parameter vector. Length 1 (geometric), p (normal) or 2 (Laplace: mu, gamma).
class Theta {
 public:
  Theta() = default;
  Theta(std::initializer_list<double> coords) : coords_(coords) {}
  explicit Theta(std::vector<double> coords) : coords_(std::move(coords)) {}

  std::span<const double> coords() const { return coords_; }
  operator std::span<const double>() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::size_t size() const { return coords_.size(); }

  friend bool operator==(const Theta&, const Theta&) = default;

 private:
  std::vector<double> coords_;
};

/// Sorted copy of a scalar sample with prefix sums, answering
/// sum_i |x_i - c| in O(log n).
class AbsDevTable {
 public:
  explicit AbsDevTable(std::span<const double> values);

  double operator()(double center) const;
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
  std::vector<double> prefix_;
};

/// n observations of q columns, row-major, with the statistics the criteria
/// need cached at construction so large samples are scanned once.
class ObservedSample {
 public:
  // Throws ArgumentError if empty, ragged, or non-finite.
  explicit ObservedSample(std::vector<double> values, std::size_t cols = 1);

  std::size_t size() const { return n_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * cols_, cols_);
  }

  const std::vector<double>& mean() const { return mean_; }
  // sum_i ||X_i||^2
  double sum_sq() const { return sum_sq_; }
  bool nonneg_integers() const { return nonneg_integers_; }

  // sum_i |X_i - center| for scalar samples, one vectorized pass.
  double sum_abs_dev(double center) const;
  AbsDevTable abs_dev_table() const;

 private:
  std::vector<double> values_;
  std::size_t cols_;
  std::size_t n_;
  std::vector<double> mean_;
  double sum_sq_ = 0.0;
  bool nonneg_integers_ = true;
};

/// Population law the data are drawn from.
class DataGeneratingProcess {
 public:
  static DataGeneratingProcess geometric(double theta0);
  // Normal with the given mean vector and identity covariance.
  static DataGeneratingProcess normal(std::vector<double> mean);
  static DataGeneratingProcess laplace(double location, double scale);

  ModelKind kind() const { return kind_; }
  double geometric_theta() const;
  const std::vector<double>& normal_mean() const;
  double laplace_location() const;
  double laplace_scale() const;

  // E X for the scalar families.
  double expectation() const;
  // E||X||^2 and ||E X||^2 (normal only).
  double expected_sq_norm() const;
  double sq_norm_of_mean() const;

 private:
  DataGeneratingProcess(ModelKind kind, std::vector<double> params)
      : kind_(kind), params_(std::move(params)) {}

  ModelKind kind_;
  std::vector<double> params_;
};

double log_density(const ModelSpec& model, std::span<const double> x, std::span<const double> theta);

// Mean log-likelihood (1/n) sum_i log p(X_i | theta), from cached statistics.
double avg_loglik(const ModelSpec& model, const ObservedSample& sample, std::span<const double> theta);

double expected_loglik(const ModelSpec& model, const DataGeneratingProcess& dgp,
                       std::span<const double> theta);

Theta true_theta0(const ModelSpec& model, const DataGeneratingProcess& dgp);

/// avg_loglik bound to one sample, for evaluation at many parameter values.
/// The Laplace case builds an AbsDevTable once.
class AverageLoglik {
 public:
  AverageLoglik(const ModelSpec& model, const ObservedSample& sample);

  double operator()(std::span<const double> theta) const;

 private:
  const ModelSpec* model_;
  const ObservedSample* sample_;
  std::optional<AbsDevTable> table_;
};

}  // namespace bayesic
