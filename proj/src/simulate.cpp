#include "bayesic/simulate.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <thread>
#include <tuple>

#include "bayesic/criteria.hpp"
#include "bayesic/errors.hpp"
#include "bayesic/limits.hpp"
#include "bayesic/rng.hpp"

namespace bayesic {
namespace {

// Folded into every derived seed so experiments never share a stream.
enum StreamTag : std::uint64_t { kDicStream = 1, kWbicStream = 2, kLaplaceStream = 3, kConsistencyStream = 4 };

// Runs body(i) for i in [0, count) on up to `jobs` threads. The first
// exception thrown by any worker is rethrown after all workers stop.
template <class Body>
void parallel_for(std::size_t count, std::size_t jobs, Body body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count || failed.load()) return;
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed.store(true);
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

// Runs `cell` for every index and concatenates the per-cell record lists in
// index order, then sorts.
template <class Cell>
std::vector<RunRecord> run_cells(std::size_t count, std::size_t jobs, Cell cell) {
  std::vector<std::vector<RunRecord>> per_cell(count);
  parallel_for(count, jobs, [&](std::size_t i) { per_cell[i] = cell(i); });
  std::vector<RunRecord> out;
  for (auto& rs : per_cell) {
    for (auto& r : rs) out.push_back(std::move(r));
  }
  sort_records(out);
  return out;
}

std::string format_eps(double eps) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ArgumentError("experiment config: " + message);
}

RunRecord base_record(const ExperimentConfig& config, std::string model, std::string criterion) {
  RunRecord r;
  r.experiment = std::string(to_string(config.kind));
  r.model = std::move(model);
  r.criterion = std::move(criterion);
  return r;
}

void finish(RunRecord& r, double value, double limit) {
  r.value = value;
  r.limit = limit;
  r.abs_error = std::fabs(value - limit);
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::DicGeometric:
      return "dic-geometric";
    case ExperimentKind::WbicNormal:
      return "wbic-normal";
    case ExperimentKind::LaplaceCriteria:
      return "laplace";
    case ExperimentKind::Consistency:
      return "consistency";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (auto k : {ExperimentKind::DicGeometric, ExperimentKind::WbicNormal,
                 ExperimentKind::LaplaceCriteria, ExperimentKind::Consistency}) {
    if (to_string(k) == name) return k;
  }
  throw ArgumentError("unknown experiment '" + std::string(name) + "'");
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.theta0s = {0.5};
  c.alphas = {1.0};
  c.betas = {1.0};
  c.epsilons = {0.05};
  c.schedules = {BetaSchedule(ScheduleKind::InvLogN)};
  switch (kind) {
    case ExperimentKind::DicGeometric:
      c.n_grid = {100, 1000, 10000, 100000, 1000000};
      c.theta0s = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
      c.alphas = {1.0, 10.0, 100.0};
      c.betas = {1.0, 10.0, 100.0};
      break;
    case ExperimentKind::WbicNormal: {
      c.n_grid = {10, 100, 1000, 10000, 100000};
      const auto all = BetaSchedule::all();
      c.schedules.assign(all.begin(), all.end());
      break;
    }
    case ExperimentKind::LaplaceCriteria:
      c.n_grid = {100, 1000, 10000, 100000};
      break;
    case ExperimentKind::Consistency:
      c.n_grid = {100, 1000, 10000, 100000};
      c.schedules = {BetaSchedule(ScheduleKind::One), BetaSchedule(ScheduleKind::InvLogN),
                     BetaSchedule(ScheduleKind::InvLogLogN), BetaSchedule(ScheduleKind::InvSqrtN)};
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  require(!n_grid.empty(), "n-grid must not be empty");
  require(n_grid.front() >= 1, "n-grid entries must be >= 1");
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    require(n_grid[i] > n_grid[i - 1], "n-grid must be strictly increasing");
  }
  require(replicates >= 1, "replicates must be >= 1");
  require(jobs >= 1, "jobs must be >= 1");
  const bool uses_schedules = kind != ExperimentKind::DicGeometric;
  if (uses_schedules) {
    require(!schedules.empty(), "schedules must not be empty");
    for (BetaSchedule s : schedules) {
      require(n_grid.front() >= s.n_min(), "n-grid minimum " + std::to_string(n_grid.front()) +
                                               " is below the minimum n of schedule " +
                                               std::string(s.name()));
    }
  }
  if (kind == ExperimentKind::DicGeometric || kind == ExperimentKind::Consistency) {
    require(!theta0s.empty(), "theta0 list must not be empty");
    for (double t : theta0s) require(t > 0.0 && t < 1.0, "theta0 values must lie in (0, 1)");
    require(!alphas.empty() && !betas.empty(), "alpha and beta lists must not be empty");
    for (double a : alphas) require(a > 0.0 && std::isfinite(a), "alpha values must be > 0");
    for (double b : betas) require(b > 0.0 && std::isfinite(b), "beta values must be > 0");
  }
  if (kind == ExperimentKind::WbicNormal || kind == ExperimentKind::Consistency) {
    require(std::isfinite(normal_theta0) && std::isfinite(prior_mean), "normal means must be finite");
  }
  if (kind == ExperimentKind::LaplaceCriteria) {
    require(laplace_scale > 0.0, "laplace scale must be > 0");
    require(box_m > 0.0 && box_s > 1.0, "box needs m > 0 and s > 1");
    require(grid_nodes >= kMinGridNodes, "grid nodes must be >= 16");
  }
  if (kind == ExperimentKind::Consistency) {
    require(!epsilons.empty(), "eps list must not be empty");
    for (double e : epsilons) require(e > 0.0, "eps values must be > 0");
    require(gibbs_nodes >= kMinGridNodes, "gibbs nodes must be >= 16");
  }
}

// Samplers --------------------------------------------------------------------

ObservedSample sample_geometric(double theta0, std::uint64_t n, std::uint64_t seed) {
  if (!(theta0 > 0.0 && theta0 < 1.0)) throw ArgumentError("sample_geometric: theta0 must lie in (0, 1)");
  if (n < 1) throw ArgumentError("sample_geometric: n must be >= 1");
  Rng rng(seed);
  const double log_fail = std::log1p(-theta0);
  std::vector<double> values(n);
  for (auto& v : values) v = std::floor(std::log(rng.uniform_open()) / log_fail);
  return ObservedSample(std::move(values));
}

ObservedSample sample_normal(std::span<const double> mean, std::uint64_t n, std::uint64_t seed) {
  if (mean.empty()) throw ArgumentError("sample_normal: mean must be non-empty");
  if (n < 1) throw ArgumentError("sample_normal: n must be >= 1");
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> values(n * mean.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < mean.size(); ++j) values[i * mean.size() + j] = mean[j] + z(rng.engine());
  }
  return ObservedSample(std::move(values), mean.size());
}

ObservedSample sample_laplace(double location, double scale, std::uint64_t n, std::uint64_t seed) {
  if (!(scale > 0.0)) throw ArgumentError("sample_laplace: scale must be > 0");
  if (n < 1) throw ArgumentError("sample_laplace: n must be >= 1");
  Rng rng(seed);
  std::vector<double> values(n);
  for (auto& v : values) {
    const double c = rng.uniform_open() - 0.5;
    const double sign = c < 0.0 ? -1.0 : (c > 0.0 ? 1.0 : 0.0);
    v = location - scale * sign * std::log(1.0 - 2.0 * std::fabs(c));
  }
  return ObservedSample(std::move(values));
}

// Experiments -----------------------------------------------------------------

std::vector<RunRecord> run_dic_geometric(const ExperimentConfig& config) {
  if (config.kind != ExperimentKind::DicGeometric) throw ArgumentError("run_dic_geometric: wrong experiment kind");
  config.validate();
  const std::size_t nt = config.theta0s.size();
  const std::size_t na = config.alphas.size();
  const std::size_t nb = config.betas.size();
  const std::size_t nn = config.n_grid.size();
  const std::size_t nr = config.replicates;

  return run_cells(nt * na * nb * nn * nr, config.jobs, [&](std::size_t cell) {
    std::size_t rest = cell;
    const std::size_t r = rest % nr;
    rest /= nr;
    const std::size_t ni = rest % nn;
    rest /= nn;
    const std::size_t bi = rest % nb;
    rest /= nb;
    const std::size_t ai = rest % na;
    const std::size_t ti = rest / na;

    const double theta0 = config.theta0s[ti];
    const double alpha = config.alphas[ai];
    const double beta = config.betas[bi];
    const std::uint64_t n = config.n_grid[ni];
    const std::uint64_t seed = derive_seed(config.seed, {kDicStream, ti, ai, bi, ni, r});
    const ObservedSample sample = sample_geometric(theta0, n, seed);
    const double xbar = sample.mean()[0];
    const double limit = limit_geometric((1.0 - theta0) / theta0).value;

    std::vector<RunRecord> out;
    for (const auto& [name, value] :
         {std::pair{"DIC-approx", dic_geometric_approx(alpha, beta, n, xbar).value},
          std::pair{"DIC-exact", dic_geometric_exact(alpha, beta, n, xbar).value}}) {
      RunRecord rec = base_record(config, "geometric", name);
      rec.theta0 = {theta0};
      rec.alpha = alpha;
      rec.beta = beta;
      rec.n = n;
      rec.replicate = r;
      rec.seed = seed;
      finish(rec, value, limit);
      out.push_back(std::move(rec));
    }
    return out;
  });
}

std::vector<RunRecord> run_wbic_normal(const ExperimentConfig& config) {
  if (config.kind != ExperimentKind::WbicNormal) throw ArgumentError("run_wbic_normal: wrong experiment kind");
  config.validate();
  const std::size_t nn = config.n_grid.size();
  const std::size_t nr = config.replicates;
  const ModelSpec model = ModelSpec::normal({config.prior_mean});
  const double theta0 = config.normal_theta0;
  const double limit = limit_normal(1, theta0 * theta0 + 1.0, theta0 * theta0).value;

  // One sample per (n, replicate), shared by every schedule.
  return run_cells(nn * nr, config.jobs, [&](std::size_t cell) {
    const std::size_t r = cell % nr;
    const std::size_t ni = cell / nr;
    const std::uint64_t n = config.n_grid[ni];
    const std::uint64_t seed = derive_seed(config.seed, {kWbicStream, 0, ni, r});
    const std::vector<double> mean{theta0};
    const ObservedSample sample = sample_normal(mean, n, seed);

    std::vector<RunRecord> out;
    for (BetaSchedule schedule : config.schedules) {
      RunRecord rec = base_record(config, "normal", "WBIC");
      rec.schedule = std::string(schedule.name());
      rec.satisfies_growth = schedule.satisfies_growth();
      rec.theta0 = {theta0};
      rec.n = n;
      rec.replicate = r;
      rec.seed = seed;
      finish(rec, wbic(model, sample, schedule).value, limit);
      out.push_back(std::move(rec));
    }
    return out;
  });
}

std::vector<RunRecord> run_laplace(const ExperimentConfig& config) {
  if (config.kind != ExperimentKind::LaplaceCriteria) throw ArgumentError("run_laplace: wrong experiment kind");
  config.validate();
  const ModelSpec model = ModelSpec::laplace(config.box_m, config.box_s);
  const auto dgp = DataGeneratingProcess::laplace(config.laplace_location, config.laplace_scale);
  const Theta theta0 = true_theta0(model, dgp);
  const double limit = limit_for(model, dgp).value;
  const std::size_t nn = config.n_grid.size();
  const std::size_t nr = config.replicates;
  GridOptions grid;
  grid.nodes_2d = config.grid_nodes;

  return run_cells(nn * nr, config.jobs, [&](std::size_t cell) {
    const std::size_t r = cell % nr;
    const std::size_t ni = cell / nr;
    const std::uint64_t n = config.n_grid[ni];
    const std::uint64_t seed = derive_seed(config.seed, {kLaplaceStream, 0, ni, r});
    const ObservedSample sample = sample_laplace(config.laplace_location, config.laplace_scale, n, seed);

    auto make = [&](const char* criterion, double value) {
      RunRecord rec = base_record(config, "laplace", criterion);
      rec.theta0.assign(theta0.coords().begin(), theta0.coords().end());
      rec.n = n;
      rec.replicate = r;
      rec.seed = seed;
      finish(rec, value, limit);
      return rec;
    };

    std::vector<RunRecord> out;
    const PowerPosterior untempered = power_posterior_for(model, sample, 1.0, grid);
    out.push_back(make("DIC", dic(model, sample, untempered).value));
    out.push_back(make("BPIC", bpic(model, sample, untempered).value));
    for (BetaSchedule schedule : config.schedules) {
      const double beta_n = schedule.evaluate(n);
      RunRecord rec = make("WBIC", wbic(model, sample, power_posterior_for(model, sample, beta_n, grid)).value);
      rec.schedule = std::string(schedule.name());
      rec.satisfies_growth = schedule.satisfies_growth();
      out.push_back(std::move(rec));
    }
    return out;
  });
}

std::vector<RunRecord> run_consistency(const ExperimentConfig& config) {
  if (config.kind != ExperimentKind::Consistency) throw ArgumentError("run_consistency: wrong experiment kind");
  config.validate();
  const std::size_t nt = config.theta0s.size();
  const std::size_t na = config.alphas.size();
  const std::size_t nb = config.betas.size();
  const std::size_t nn = config.n_grid.size();
  const std::size_t nr = config.replicates;
  const std::size_t geometric_cells = nt * na * nb * nn * nr;
  const std::size_t normal_cells = nn * nr;

  auto annotate = [&](RunRecord& rec, BetaSchedule schedule, std::uint64_t n, std::size_t r,
                      std::uint64_t seed) {
    rec.schedule = std::string(schedule.name());
    rec.satisfies_growth = schedule.satisfies_growth();
    rec.n = n;
    rec.replicate = r;
    rec.seed = seed;
  };

  auto geometric_cell = [&](std::size_t cell) {
    std::size_t rest = cell;
    const std::size_t r = rest % nr;
    rest /= nr;
    const std::size_t ni = rest % nn;
    rest /= nn;
    const std::size_t bi = rest % nb;
    rest /= nb;
    const std::size_t ai = rest % na;
    const std::size_t ti = rest / na;
    const double theta0 = config.theta0s[ti];
    const std::uint64_t n = config.n_grid[ni];
    const std::uint64_t seed = derive_seed(config.seed, {kConsistencyStream, 0, ti, ai, bi, ni, r});
    const ObservedSample sample = sample_geometric(theta0, n, seed);
    const ModelSpec model = ModelSpec::geometric(config.alphas[ai], config.betas[bi]);
    const std::vector<double> center{theta0};

    std::vector<RunRecord> out;
    for (BetaSchedule schedule : config.schedules) {
      const double beta_n = schedule.evaluate(n);
      const PowerPosterior post = power_posterior_for(model, sample, beta_n);
      std::optional<PowerPosterior> gibbs, eta1;
      if (config.gibbs_variants) {
        const AverageLoglik loglik(model, sample);
        const ThetaFn utility = [&](std::span<const double> t) { return loglik(t); };
        const ThetaFn log_prior = [&](std::span<const double> t) { return model.log_prior(t); };
        const std::array<std::size_t, 1> nodes{config.gibbs_nodes};
        const double gamma_n = static_cast<double>(n) * beta_n;
        gibbs.emplace(gibbs_posterior(utility, gamma_n, model.parameter_box(), nodes, log_prior));
        eta1.emplace(eta_rescaled_posterior(utility, gamma_n, 1, model.parameter_box(), nodes, log_prior));
      }
      for (double eps : config.epsilons) {
        auto emit = [&](const std::string& prefix, const PowerPosterior& p) {
          RunRecord rec = base_record(config, "geometric", prefix + "@" + format_eps(eps));
          rec.theta0 = center;
          rec.alpha = config.alphas[ai];
          rec.beta = config.betas[bi];
          annotate(rec, schedule, n, r, seed);
          finish(rec, ball_mass(p, center, eps), 1.0);
          out.push_back(std::move(rec));
        };
        emit("ball-mass", post);
        if (gibbs) {
          emit("gibbs-ball-mass", *gibbs);
          emit("eta1-ball-mass", *eta1);
        }
      }
    }
    return out;
  };

  auto normal_cell = [&](std::size_t cell) {
    const std::size_t r = cell % nr;
    const std::size_t ni = cell / nr;
    const std::uint64_t n = config.n_grid[ni];
    const std::uint64_t seed = derive_seed(config.seed, {kConsistencyStream, 1, ni, r});
    const std::vector<double> center{config.normal_theta0};
    const ObservedSample sample = sample_normal(center, n, seed);
    const ModelSpec model = ModelSpec::normal({config.prior_mean});

    std::vector<RunRecord> out;
    for (BetaSchedule schedule : config.schedules) {
      const PowerPosterior post = power_posterior_for(model, sample, schedule.evaluate(n));
      for (double eps : config.epsilons) {
        RunRecord rec = base_record(config, "normal", "ball-mass@" + format_eps(eps));
        rec.theta0 = center;
        annotate(rec, schedule, n, r, seed);
        finish(rec, ball_mass(post, center, eps), 1.0);
        out.push_back(std::move(rec));
      }
    }
    return out;
  };

  return run_cells(geometric_cells + normal_cells, config.jobs, [&](std::size_t cell) {
    return cell < geometric_cells ? geometric_cell(cell) : normal_cell(cell - geometric_cells);
  });
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::DicGeometric:
      return run_dic_geometric(config);
    case ExperimentKind::WbicNormal:
      return run_wbic_normal(config);
    case ExperimentKind::LaplaceCriteria:
      return run_laplace(config);
    case ExperimentKind::Consistency:
      return run_consistency(config);
  }
  throw ArgumentError("unknown experiment kind");
}

// Post-processing ---------------------------------------------------------------

void sort_records(std::vector<RunRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.experiment, a.model, a.criterion, a.schedule, a.theta0, a.alpha, a.beta, a.n,
                    a.replicate) < std::tie(b.experiment, b.model, b.criterion, b.schedule,
                                            b.theta0, b.alpha, b.beta, b.n, b.replicate);
  });
}

void rescale_records(std::vector<RunRecord>& records) {
  for (auto& r : records) {
    const double n = static_cast<double>(r.n);
    double factor = 1.0;
    if (r.criterion.starts_with("WBIC")) {
      factor = n / 2.0;
    } else if (r.criterion.starts_with("DIC") || r.criterion.starts_with("BPIC")) {
      factor = n;
    }
    r.value *= factor;
    r.limit *= factor;
    r.abs_error = std::fabs(r.value - r.limit);
  }
}

std::vector<SummaryRow> summarize(std::span<const RunRecord> records) {
  if (records.empty()) throw ArgumentError("summarize: no records");
  using Key = std::tuple<std::string, std::string, std::string, std::string, std::vector<double>,
                         std::optional<double>, std::optional<double>, std::uint64_t>;
  std::map<Key, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) {
    groups[Key{r.experiment, r.model, r.criterion, r.schedule, r.theta0, r.alpha, r.beta, r.n}]
        .push_back(&r);
  }

  auto lower_median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
  };

  std::vector<SummaryRow> out;
  out.reserve(groups.size());
  for (const auto& [key, members] : groups) {
    SummaryRow row;
    std::tie(row.experiment, row.model, row.criterion, row.schedule, row.theta0, row.alpha, row.beta,
             row.n) = key;
    row.count = members.size();
    std::vector<double> values, errors;
    for (const RunRecord* m : members) {
      values.push_back(m->value);
      errors.push_back(m->abs_error);
    }
    row.min_value = *std::min_element(values.begin(), values.end());
    row.max_value = *std::max_element(values.begin(), values.end());
    row.median_value = lower_median(values);
    row.median_abs_error = lower_median(std::move(errors));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace bayesic
