#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bayesic/models.hpp"
#include "bayesic/posterior.hpp"

namespace bayesic {

enum class ExperimentKind { DicGeometric, WbicNormal, LaplaceCriteria, Consistency };

// "dic-geometric", "wbic-normal", "laplace", "consistency"
std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

inline constexpr std::uint64_t kDefaultSeed = 20250101;

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::DicGeometric;
  std::vector<std::uint64_t> n_grid;
  std::size_t replicates = 10;
  std::uint64_t seed = kDefaultSeed;
  // Worker threads; output does not depend on it.
  std::size_t jobs = 1;

  // Geometric: true success probabilities and Beta(alpha, beta) prior grid.
  std::vector<double> theta0s;
  std::vector<double> alphas;
  std::vector<double> betas;

  // Normal: data N(normal_theta0, 1), prior N(prior_mean, 1).
  double normal_theta0 = 1.0;
  double prior_mean = 0.0;
  std::vector<BetaSchedule> schedules;

  // Laplace: data Laplace(location, scale), parameter box [-m, m] x [1/s, s].
  double laplace_location = 0.0;
  double laplace_scale = 1.0;
  double box_m = 4.0;
  double box_s = 8.0;
  std::size_t grid_nodes = 256;

  // Consistency: ball radii, and whether to add Gibbs / eta-rescaled curves.
  std::vector<double> epsilons;
  bool gibbs_variants = false;
  std::size_t gibbs_nodes = 4096;

  static ExperimentConfig defaults(ExperimentKind kind);
  // Throws ArgumentError naming the offending field.
  void validate() const;
};

/// One simulated evaluation, the row type behind the CSV output.
struct RunRecord {
  std::string experiment;
  std::string model;
  std::string criterion;
  std::string schedule = "-";
  std::vector<double> theta0;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::uint64_t n = 0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  double value = 0.0;
  double limit = 0.0;
  double abs_error = 0.0;
  // Whether n * beta_n diverges for the schedule, when a schedule applies.
  std::optional<bool> satisfies_growth;
};

struct SummaryRow {
  std::string experiment;
  std::string model;
  std::string criterion;
  std::string schedule;
  std::vector<double> theta0;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::uint64_t n = 0;
  std::size_t count = 0;
  double median_value = 0.0;
  double median_abs_error = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
};

// Inverse-CDF draws: floor(log U / log(1 - theta0)).
ObservedSample sample_geometric(double theta0, std::uint64_t n, std::uint64_t seed);
ObservedSample sample_normal(std::span<const double> mean, std::uint64_t n, std::uint64_t seed);
// Inverse-CDF draws: mu - b sgn(U - 1/2) log(1 - 2|U - 1/2|).
ObservedSample sample_laplace(double location, double scale, std::uint64_t n, std::uint64_t seed);

std::vector<RunRecord> run_dic_geometric(const ExperimentConfig& config);
std::vector<RunRecord> run_wbic_normal(const ExperimentConfig& config);
std::vector<RunRecord> run_laplace(const ExperimentConfig& config);
std::vector<RunRecord> run_consistency(const ExperimentConfig& config);
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

// Deterministic emission order: experiment, model, criterion, schedule,
// theta0, alpha, beta, n, replicate.
void sort_records(std::vector<RunRecord>& records);

// Criterion records to the conventional n-multiplied scale (WBIC by n/2);
// ball-mass records are left alone.
void rescale_records(std::vector<RunRecord>& records);

/// Median (lower median for even counts), min and max per
/// (experiment, model, criterion, schedule, theta0, alpha, beta, n).
/// Throws ArgumentError on empty input.
std::vector<SummaryRow> summarize(std::span<const RunRecord> records);

}  // namespace bayesic
