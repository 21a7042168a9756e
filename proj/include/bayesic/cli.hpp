#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bayesic/models.hpp"
#include "bayesic/posterior.hpp"
#include "bayesic/simulate.hpp"

namespace bayesic::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

// Bad flag, bad value, unknown subcommand: exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable input, unwritable output, malformed data rows: exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Subcommand { Simulate, Criteria, Consistency, Limits };

struct CriteriaRequest {
  ModelKind model = ModelKind::Geometric;
  std::string data_path;
  bool header = false;
  BetaSchedule schedule{ScheduleKind::InvLogN};
  double alpha = 1.0;
  double beta = 1.0;
  // Empty means a zero prior mean; a single entry is broadcast to every column.
  std::vector<double> prior_mean;
  double box_m = 4.0;
  double box_s = 8.0;
  std::size_t grid_nodes = 256;
};

struct LimitsRequest {
  ModelKind model = ModelKind::Geometric;
  // geometric: EX; normal: p, E||X||^2, ||EX||^2; laplace: gamma0.
  std::vector<double> params;
};

struct CliInvocation {
  Subcommand subcommand = Subcommand::Simulate;
  ExperimentConfig experiment;
  CriteriaRequest criteria;
  LimitsRequest limits;
  std::optional<std::string> out_path;
  bool rescale_n = false;
  bool summary = false;
};

struct ParseOutcome {
  // Empty when parsing stopped early (--help or an error).
  std::optional<CliInvocation> invocation;
  int exit_code = kExitOk;
  // Help text or error message.
  std::string message;
};

/// Parses arguments (without the program name). Precedence is built-in
/// defaults < BAYESIC_SEED (seed only) < --config file < flags.
ParseOutcome parse_args(const std::vector<std::string>& args,
                        std::optional<std::string> env_seed = std::nullopt);

/// Flat `key = value` lines with `#` comments. Throws DataError when the file
/// cannot be read, UsageError on malformed lines.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// One observation per line, comma-separated columns. Geometric rows must be
/// non-negative integers; normal rows must all have the same width.
/// Throws DataError naming the offending line.
ObservedSample ingest_csv(const std::string& path, ModelKind kind, bool header = false);
ObservedSample parse_csv_sample(std::istream& in, ModelKind kind, bool header = false);

inline constexpr std::string_view kRecordHeader =
    "experiment,model,criterion,schedule,theta0,alpha,beta,n,replicate,seed,value,limit,abs_error";
inline constexpr std::string_view kSummaryHeader =
    "experiment,model,criterion,schedule,theta0,alpha,beta,n,count,median_value,median_abs_error,"
    "min_value,max_value";

// Floats are written with 17 significant digits; lines end in LF.
void write_records(std::ostream& out, std::span<const RunRecord> records);
void write_summary(std::ostream& out, std::span<const SummaryRow> rows);
// Parses one data line produced by write_records.
RunRecord parse_record_line(std::string_view line);

// Writes to `path`, or to `fallback` when no path is given. Throws DataError
// if the file cannot be written.
void emit_records(std::span<const RunRecord> records, const std::optional<std::string>& path,
                  std::ostream& fallback);
void emit_summary(std::span<const SummaryRow> rows, const std::optional<std::string>& path,
                  std::ostream& fallback);

std::string format_double(double v);

/// Executes a parsed invocation; returns the process exit code.
int execute(const CliInvocation& invocation, std::ostream& out, std::ostream& err);

/// parse_args + execute, with errors mapped to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bayesic::cli
