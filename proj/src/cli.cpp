#include "bayesic/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bayesic/criteria.hpp"
#include "bayesic/errors.hpp"
#include "bayesic/limits.hpp"

namespace bayesic::cli {
namespace {

enum Scope : unsigned { kExperimentScope = 1, kCriteriaScope = 2, kLimitsScope = 4, kAllScopes = 7 };

struct OptionSpec {
  const char* name;
  const char* help;
  bool is_flag;
  unsigned scopes;
};

constexpr OptionSpec kOptions[] = {
    {"seed", "Base RNG seed (default: $BAYESIC_SEED or built-in)", false, kAllScopes},
    {"replicates", "Replicates per cell", false, kAllScopes},
    {"n-grid", "Comma-separated, strictly increasing sample sizes", false, kAllScopes},
    {"out", "Output path (default: stdout)", false, kAllScopes},
    {"config", "Flat key = value configuration file", false, kAllScopes},
    {"jobs", "Worker threads", false, kAllScopes},
    {"rescale-n", "Report n*DIC, n*BPIC and n*WBIC/2", true, kAllScopes},
    {"summary", "Emit the per-group summary instead of raw records", true, kExperimentScope},
    {"theta0", "Comma-separated geometric success probabilities", false, kExperimentScope},
    {"alphas", "Comma-separated Beta prior alpha values", false, kExperimentScope},
    {"betas", "Comma-separated Beta prior beta values", false, kExperimentScope},
    {"schedules", "Comma-separated temperature schedules", false, kExperimentScope},
    {"eps", "Comma-separated ball radii", false, kExperimentScope},
    {"normal-theta0", "Mean of the simulated normal data", false, kExperimentScope},
    {"laplace-location", "Location of the simulated Laplace data", false, kExperimentScope},
    {"laplace-scale", "Scale of the simulated Laplace data", false, kExperimentScope},
    {"gibbs", "Add Gibbs and eta-rescaled ball-mass curves", true, kExperimentScope},
    {"prior-mean", "Normal prior mean (comma-separated, or one value)", false,
     kExperimentScope | kCriteriaScope},
    {"box", "Laplace parameter box as m,s", false, kExperimentScope | kCriteriaScope},
    {"grid-nodes", "Laplace grid nodes per axis", false, kExperimentScope | kCriteriaScope},
    {"model", "geometric | normal | laplace", false, kCriteriaScope | kLimitsScope},
    {"data", "CSV data file, one observation per line", false, kCriteriaScope},
    {"header", "Data file has a header line", true, kCriteriaScope},
    {"schedule", "Temperature schedule for WBIC", false, kCriteriaScope},
    {"alpha", "Beta prior alpha", false, kCriteriaScope},
    {"beta", "Beta prior beta", false, kCriteriaScope},
    {"params", "Limit inputs (geometric: EX; normal: p,E|X|^2,|EX|^2; laplace: gamma0)", false,
     kLimitsScope},
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

[[noreturn]] void bad_value(const std::string& flag, const std::string& value, const std::string& why) {
  throw UsageError("invalid value for --" + flag + ": '" + value + "' (" + why + ")");
}

double parse_double(const std::string& flag, const std::string& value) {
  const auto v = to_double(trim(value));
  if (!v || !std::isfinite(*v)) bad_value(flag, value, "expected a finite number");
  return *v;
}

std::uint64_t parse_u64(const std::string& flag, const std::string& value) {
  const auto v = to_u64(trim(value));
  if (!v) bad_value(flag, value, "expected a non-negative integer");
  return *v;
}

std::vector<double> parse_double_list(const std::string& flag, const std::string& value) {
  std::vector<double> out;
  for (const auto& part : split(value, ',')) out.push_back(parse_double(flag, part));
  return out;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& flag, const std::string& value) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split(value, ',')) out.push_back(parse_u64(flag, part));
  return out;
}

bool parse_bool(const std::string& flag, const std::string& value) {
  const std::string v = trim(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(flag, value, "expected true or false");
}

std::vector<BetaSchedule> parse_schedules(const std::string& flag, const std::string& value) {
  std::vector<BetaSchedule> out;
  for (const auto& part : split(value, ',')) {
    try {
      out.push_back(BetaSchedule::parse(part));
    } catch (const ArgumentError&) {
      bad_value(flag, value, "unknown schedule '" + part + "'");
    }
  }
  return out;
}

ModelKind parse_model(const std::string& flag, const std::string& value) {
  try {
    return parse_model_kind(trim(value));
  } catch (const ArgumentError&) {
    bad_value(flag, value, "expected geometric, normal or laplace");
  }
}

// Resolves option values with defaults < env (seed) < config < flags.
class Resolver {
 public:
  Resolver(std::map<std::string, CLI::Option*> options, const std::map<std::string, std::string>& flag_values,
           const std::map<std::string, bool>& flag_switches, std::map<std::string, std::string> config,
           std::optional<std::string> env_seed)
      : options_(std::move(options)),
        flag_values_(flag_values),
        flag_switches_(flag_switches),
        config_(std::move(config)),
        env_seed_(std::move(env_seed)) {
    for (const auto& [key, value] : config_) {
      if (key == "config" || !options_.contains(key)) {
        throw UsageError("unknown key '" + key + "' in config file");
      }
    }
  }

  bool given_on_command_line(const std::string& name) const {
    const auto it = options_.find(name);
    return it != options_.end() && it->second->count() > 0;
  }

  std::optional<std::string> value(const std::string& name) const {
    if (given_on_command_line(name)) return flag_values_.at(name);
    if (const auto it = config_.find(name); it != config_.end()) return it->second;
    if (name == "seed" && env_seed_) return env_seed_;
    return std::nullopt;
  }

  bool flag(const std::string& name) const {
    if (given_on_command_line(name)) return flag_switches_.at(name);
    if (const auto it = config_.find(name); it != config_.end()) return parse_bool(name, it->second);
    return false;
  }

 private:
  std::map<std::string, CLI::Option*> options_;
  const std::map<std::string, std::string>& flag_values_;
  const std::map<std::string, bool>& flag_switches_;
  std::map<std::string, std::string> config_;
  std::optional<std::string> env_seed_;
};

void apply_globals(const Resolver& r, CliInvocation& inv) {
  if (auto v = r.value("out")) inv.out_path = *v;
  inv.rescale_n = r.flag("rescale-n");
}

ExperimentConfig build_experiment(const Resolver& r, ExperimentKind kind) {
  ExperimentConfig c = ExperimentConfig::defaults(kind);
  if (auto v = r.value("seed")) c.seed = parse_u64("seed", *v);
  if (auto v = r.value("replicates")) c.replicates = parse_u64("replicates", *v);
  if (auto v = r.value("n-grid")) c.n_grid = parse_u64_list("n-grid", *v);
  if (auto v = r.value("jobs")) c.jobs = parse_u64("jobs", *v);
  if (auto v = r.value("theta0")) c.theta0s = parse_double_list("theta0", *v);
  if (auto v = r.value("alphas")) c.alphas = parse_double_list("alphas", *v);
  if (auto v = r.value("betas")) c.betas = parse_double_list("betas", *v);
  if (auto v = r.value("schedules")) c.schedules = parse_schedules("schedules", *v);
  if (auto v = r.value("eps")) c.epsilons = parse_double_list("eps", *v);
  if (auto v = r.value("normal-theta0")) c.normal_theta0 = parse_double("normal-theta0", *v);
  if (auto v = r.value("prior-mean")) c.prior_mean = parse_double("prior-mean", *v);
  if (auto v = r.value("laplace-location")) c.laplace_location = parse_double("laplace-location", *v);
  if (auto v = r.value("laplace-scale")) c.laplace_scale = parse_double("laplace-scale", *v);
  if (auto v = r.value("box")) {
    const auto ms = parse_double_list("box", *v);
    if (ms.size() != 2) bad_value("box", *v, "expected m,s");
    c.box_m = ms[0];
    c.box_s = ms[1];
  }
  if (auto v = r.value("grid-nodes")) c.grid_nodes = parse_u64("grid-nodes", *v);
  c.gibbs_variants = r.flag("gibbs");
  try {
    c.validate();
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  return c;
}

CriteriaRequest build_criteria(const Resolver& r) {
  CriteriaRequest c;
  const auto model = r.value("model");
  if (!model) throw UsageError("--model is required");
  c.model = parse_model("model", *model);
  const auto data = r.value("data");
  if (!data) throw UsageError("--data is required");
  c.data_path = *data;
  c.header = r.flag("header");
  if (auto v = r.value("schedule")) {
    const auto s = parse_schedules("schedule", *v);
    if (s.size() != 1) bad_value("schedule", *v, "expected a single schedule");
    c.schedule = s[0];
  }
  if (auto v = r.value("alpha")) c.alpha = parse_double("alpha", *v);
  if (auto v = r.value("beta")) c.beta = parse_double("beta", *v);
  if (!(c.alpha > 0.0)) bad_value("alpha", std::to_string(c.alpha), "must be > 0");
  if (!(c.beta > 0.0)) bad_value("beta", std::to_string(c.beta), "must be > 0");
  if (auto v = r.value("prior-mean")) c.prior_mean = parse_double_list("prior-mean", *v);
  if (auto v = r.value("box")) {
    const auto ms = parse_double_list("box", *v);
    if (ms.size() != 2 || !(ms[0] > 0.0) || !(ms[1] > 1.0)) bad_value("box", *v, "expected m,s with m > 0, s > 1");
    c.box_m = ms[0];
    c.box_s = ms[1];
  }
  if (auto v = r.value("grid-nodes")) {
    c.grid_nodes = parse_u64("grid-nodes", *v);
    if (c.grid_nodes < kMinGridNodes) bad_value("grid-nodes", *v, "must be >= 16");
  }
  return c;
}

LimitsRequest build_limits(const Resolver& r) {
  LimitsRequest l;
  const auto model = r.value("model");
  if (!model) throw UsageError("--model is required");
  l.model = parse_model("model", *model);
  const auto params = r.value("params");
  if (!params) throw UsageError("--params is required");
  l.params = parse_double_list("params", *params);
  const std::size_t expected = l.model == ModelKind::Normal ? 3 : 1;
  if (l.params.size() != expected) {
    bad_value("params", *params, "expected " + std::to_string(expected) + " value(s) for this model");
  }
  return l;
}

void write_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) {
    out << format_double(*v);
  } else {
    out << '-';
  }
}

std::string join_theta(const std::vector<double>& theta) {
  std::string s;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (i > 0) s += ';';
    s += format_double(theta[i]);
  }
  return s.empty() ? "-" : s;
}

template <class Writer>
void emit_to(const std::optional<std::string>& path, std::ostream& fallback, Writer write) {
  if (!path) {
    write(fallback);
    fallback.flush();
    return;
  }
  std::ofstream file(*path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot open '" + *path + "' for writing");
  write(file);
  file.flush();
  if (!file) throw DataError("failed writing '" + *path + "'");
}

int execute_criteria(const CliInvocation& inv, std::ostream& out) {
  const auto& req = inv.criteria;
  const ObservedSample sample = ingest_csv(req.data_path, req.model, req.header);

  std::optional<ModelSpec> model;
  switch (req.model) {
    case ModelKind::Geometric:
      model = ModelSpec::geometric(req.alpha, req.beta);
      break;
    case ModelKind::Normal: {
      std::vector<double> mu(sample.cols(), 0.0);
      if (req.prior_mean.size() == 1) {
        std::fill(mu.begin(), mu.end(), req.prior_mean[0]);
      } else if (!req.prior_mean.empty()) {
        if (req.prior_mean.size() != sample.cols()) {
          throw UsageError("--prior-mean has " + std::to_string(req.prior_mean.size()) +
                           " entries but the data have " + std::to_string(sample.cols()) + " columns");
        }
        mu = req.prior_mean;
      }
      model = ModelSpec::normal(std::move(mu));
      break;
    }
    case ModelKind::Laplace:
      model = ModelSpec::laplace(req.box_m, req.box_s);
      break;
  }

  GridOptions grid;
  grid.nodes_2d = req.grid_nodes;
  const double beta_n = req.schedule.evaluate(sample.size());
  const PowerPosterior untempered = power_posterior_for(*model, sample, 1.0, grid);
  std::vector<CriterionValue> values{dic(*model, sample, untempered), bpic(*model, sample, untempered)};
  if (req.model == ModelKind::Geometric) {
    values.push_back(dic_geometric_approx(req.alpha, req.beta, sample.size(), sample.mean()[0]));
  }
  values.push_back(wbic(*model, sample, power_posterior_for(*model, sample, beta_n, grid)));

  emit_to(inv.out_path, out, [&](std::ostream& os) {
    os << "criterion,method,schedule,n,beta_n,value\n";
    for (const auto& v : values) {
      const double value = inv.rescale_n ? rescale_to_n(v.kind, v.n, v.value) : v.value;
      const std::string_view schedule = v.kind == CriterionKind::WBIC ? req.schedule.name() : "-";
      os << to_string(v.kind) << ',' << to_string(v.method) << ',' << schedule << ',' << v.n << ','
         << format_double(v.beta_n) << ',' << format_double(value) << '\n';
    }
  });
  return kExitOk;
}

int execute_limits(const CliInvocation& inv, std::ostream& out) {
  const auto& p = inv.limits.params;
  LimitValue limit{};
  try {
    switch (inv.limits.model) {
      case ModelKind::Geometric:
        limit = limit_geometric(p[0]);
        break;
      case ModelKind::Normal: {
        if (!(p[0] >= 1.0) || p[0] != std::floor(p[0])) throw DomainError("p must be a positive integer");
        limit = limit_normal(static_cast<std::size_t>(p[0]), p[1], p[2]);
        break;
      }
      case ModelKind::Laplace:
        limit = limit_laplace(p[0]);
        break;
    }
  } catch (const DomainError& e) {
    throw UsageError(std::string("invalid value for --params: ") + e.what());
  }
  emit_to(inv.out_path, out, [&](std::ostream& os) {
    os << "model,value\n" << to_string(limit.model) << ',' << format_double(limit.value) << '\n';
  });
  return kExitOk;
}

int execute_experiment(const CliInvocation& inv, std::ostream& out) {
  std::vector<RunRecord> records = run_experiment(inv.experiment);
  if (inv.rescale_n) rescale_records(records);
  if (inv.summary) {
    emit_summary(summarize(records), inv.out_path, out);
  } else {
    emit_records(records, inv.out_path, out);
  }
  return kExitOk;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config file '" + path + "' line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.starts_with("--")) key.erase(0, 2);
    if (key.empty()) {
      throw UsageError("config file '" + path + "' line " + std::to_string(lineno) + ": empty key");
    }
    out[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return out;
}

ParseOutcome parse_args(const std::vector<std::string>& args, std::optional<std::string> env_seed) {
  CLI::App app{"Bayesian information criteria under power and Gibbs posteriors", "bayesic"};
  app.require_subcommand(1);

  std::map<std::string, std::string> values;
  std::map<std::string, bool> switches;
  std::map<CLI::App*, std::map<std::string, CLI::Option*>> registered;

  auto add_options = [&](CLI::App* leaf, unsigned scope) {
    for (const auto& spec : kOptions) {
      if ((spec.scopes & scope) == 0) continue;
      const std::string flag = std::string("--") + spec.name;
      CLI::Option* opt = spec.is_flag ? leaf->add_flag(flag, switches[spec.name], spec.help)
                                      : leaf->add_option(flag, values[spec.name], spec.help);
      registered[leaf][spec.name] = opt;
    }
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Run a replicated simulation experiment");
  simulate->require_subcommand(1);
  std::map<CLI::App*, ExperimentKind> experiment_apps;
  for (auto kind : {ExperimentKind::DicGeometric, ExperimentKind::WbicNormal,
                    ExperimentKind::LaplaceCriteria, ExperimentKind::Consistency}) {
    CLI::App* sub = simulate->add_subcommand(std::string(to_string(kind)));
    add_options(sub, kExperimentScope);
    experiment_apps[sub] = kind;
  }
  CLI::App* consistency = app.add_subcommand("consistency", "Posterior ball-mass curves");
  add_options(consistency, kExperimentScope);
  experiment_apps[consistency] = ExperimentKind::Consistency;
  CLI::App* criteria = app.add_subcommand("criteria", "Evaluate DIC, BPIC and WBIC on a data file");
  add_options(criteria, kCriteriaScope);
  CLI::App* limits = app.add_subcommand("limits", "Large-sample limit of the criteria");
  add_options(limits, kLimitsScope);

  std::vector<const char*> argv{"bayesic"};
  for (const auto& a : args) argv.push_back(a.c_str());

  ParseOutcome outcome;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    outcome.message = app.help();
    if (const auto subs = app.get_subcommands(); !subs.empty()) {
      CLI::App* leaf = subs.front();
      if (const auto nested = leaf->get_subcommands(); !nested.empty()) leaf = nested.front();
      outcome.message = leaf->help();
    }
    outcome.exit_code = kExitOk;
    return outcome;
  } catch (const CLI::ParseError& e) {
    outcome.message = e.what();
    outcome.exit_code = kExitUsage;
    return outcome;
  }

  CLI::App* leaf = app.get_subcommands().front();
  if (leaf == simulate) leaf = simulate->get_subcommands().front();

  try {
    std::map<std::string, std::string> config;
    const auto& opts = registered[leaf];
    if (opts.at("config")->count() > 0) config = read_config_file(values["config"]);
    const Resolver resolver(opts, values, switches, std::move(config), std::move(env_seed));

    CliInvocation inv;
    apply_globals(resolver, inv);
    if (const auto it = experiment_apps.find(leaf); it != experiment_apps.end()) {
      inv.subcommand = leaf == consistency ? Subcommand::Consistency : Subcommand::Simulate;
      inv.experiment = build_experiment(resolver, it->second);
      inv.summary = resolver.flag("summary");
    } else if (leaf == criteria) {
      inv.subcommand = Subcommand::Criteria;
      inv.criteria = build_criteria(resolver);
    } else {
      inv.subcommand = Subcommand::Limits;
      inv.limits = build_limits(resolver);
    }
    outcome.invocation = std::move(inv);
  } catch (const UsageError& e) {
    outcome.message = e.what();
    outcome.exit_code = kExitUsage;
  } catch (const DataError& e) {
    outcome.message = e.what();
    outcome.exit_code = kExitData;
  }
  return outcome;
}

ObservedSample parse_csv_sample(std::istream& in, ModelKind kind, bool header) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (header && lineno == 1) continue;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto fields = split(t, ',');
    if (cols == 0) cols = fields.size();
    if (fields.size() != cols) {
      throw DataError("row " + std::to_string(lineno) + ": expected " + std::to_string(cols) +
                      " columns, found " + std::to_string(fields.size()));
    }
    if (kind != ModelKind::Normal && cols != 1) {
      throw DataError("row " + std::to_string(lineno) + ": " + std::string(to_string(kind)) +
                      " data must have a single column");
    }
    for (const auto& f : fields) {
      const auto v = to_double(f);
      if (!v || !std::isfinite(*v)) {
        throw DataError("row " + std::to_string(lineno) + ": '" + f + "' is not a finite number");
      }
      if (kind == ModelKind::Geometric && (*v < 0.0 || *v != std::floor(*v))) {
        throw DataError("row " + std::to_string(lineno) + ": geometric observations must be non-negative integers, got '" +
                        f + "'");
      }
      values.push_back(*v);
    }
  }
  if (values.empty()) throw DataError("no observations found");
  return ObservedSample(std::move(values), cols);
}

ObservedSample ingest_csv(const std::string& path, ModelKind kind, bool header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read data file '" + path + "'");
  try {
    return parse_csv_sample(in, kind, header);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_records(std::ostream& out, std::span<const RunRecord> records) {
  out << kRecordHeader << '\n';
  for (const auto& r : records) {
    out << r.experiment << ',' << r.model << ',' << r.criterion << ',' << r.schedule << ','
        << join_theta(r.theta0) << ',';
    write_optional(out, r.alpha);
    out << ',';
    write_optional(out, r.beta);
    out << ',' << r.n << ',' << r.replicate << ',' << r.seed << ',' << format_double(r.value) << ','
        << format_double(r.limit) << ',' << format_double(r.abs_error) << '\n';
  }
}

void write_summary(std::ostream& out, std::span<const SummaryRow> rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.model << ',' << r.criterion << ',' << r.schedule << ','
        << join_theta(r.theta0) << ',';
    write_optional(out, r.alpha);
    out << ',';
    write_optional(out, r.beta);
    out << ',' << r.n << ',' << r.count << ',' << format_double(r.median_value) << ','
        << format_double(r.median_abs_error) << ',' << format_double(r.min_value) << ','
        << format_double(r.max_value) << '\n';
  }
}

RunRecord parse_record_line(std::string_view line) {
  const auto f = split(line, ',');
  if (f.size() != 13) throw DataError("record line has " + std::to_string(f.size()) + " fields, expected 13");
  auto num = [&](std::size_t i) {
    const auto v = to_double(f[i]);
    if (!v) throw DataError("record field " + std::to_string(i + 1) + " is not a number: '" + f[i] + "'");
    return *v;
  };
  auto opt = [&](std::size_t i) -> std::optional<double> {
    if (f[i] == "-") return std::nullopt;
    return num(i);
  };
  auto u64 = [&](std::size_t i) {
    const auto v = to_u64(f[i]);
    if (!v) throw DataError("record field " + std::to_string(i + 1) + " is not an integer: '" + f[i] + "'");
    return *v;
  };
  RunRecord r;
  r.experiment = f[0];
  r.model = f[1];
  r.criterion = f[2];
  r.schedule = f[3];
  if (f[4] != "-") {
    for (const auto& part : split(f[4], ';')) {
      const auto v = to_double(part);
      if (!v) throw DataError("bad theta0 component '" + part + "'");
      r.theta0.push_back(*v);
    }
  }
  r.alpha = opt(5);
  r.beta = opt(6);
  r.n = u64(7);
  r.replicate = u64(8);
  r.seed = u64(9);
  r.value = num(10);
  r.limit = num(11);
  r.abs_error = num(12);
  return r;
}

void emit_records(std::span<const RunRecord> records, const std::optional<std::string>& path,
                  std::ostream& fallback) {
  emit_to(path, fallback, [&](std::ostream& os) { write_records(os, records); });
}

void emit_summary(std::span<const SummaryRow> rows, const std::optional<std::string>& path,
                  std::ostream& fallback) {
  emit_to(path, fallback, [&](std::ostream& os) { write_summary(os, rows); });
}

int execute(const CliInvocation& invocation, std::ostream& out, std::ostream& err) {
  try {
    switch (invocation.subcommand) {
      case Subcommand::Simulate:
      case Subcommand::Consistency:
        return execute_experiment(invocation, out);
      case Subcommand::Criteria:
        return execute_criteria(invocation, out);
      case Subcommand::Limits:
        return execute_limits(invocation, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::optional<std::string> env_seed;
  if (const char* s = std::getenv("BAYESIC_SEED")) env_seed = s;
  const ParseOutcome parsed = parse_args(args, env_seed);
  if (!parsed.invocation) {
    if (parsed.exit_code == kExitOk) {
      out << parsed.message;
    } else {
      err << "error: " << parsed.message << "\nRun with --help for usage.\n";
    }
    return parsed.exit_code;
  }
  return execute(*parsed.invocation, out, err);
}

}  // namespace bayesic::cli
