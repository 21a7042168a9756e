#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bayesic/cli.hpp"
#include "bayesic/criteria.hpp"
#include "doctest.h"

using namespace bayesic;
namespace fs = std::filesystem;

namespace {

struct Spawned {
  int code;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("bayesic-cli-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_file(const std::string& name, const std::string& body) {
  const fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << body;
  return p;
}

Spawned spawn(const std::string& args, const std::string& env = "") {
  const fs::path out = scratch() / "stdout.txt";
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = env + " " + BAYESIC_CLI_PATH + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

cli::ParseOutcome parse(std::vector<std::string> args, std::optional<std::string> env = std::nullopt) {
  return cli::parse_args(args, std::move(env));
}

}  // namespace

TEST_CASE("parse examples") {
  const auto a = parse({"simulate", "dic-geometric", "--seed", "42"});
  REQUIRE(a.invocation);
  CHECK(a.invocation->subcommand == cli::Subcommand::Simulate);
  CHECK(a.invocation->experiment.kind == ExperimentKind::DicGeometric);
  CHECK(a.invocation->experiment.seed == 42);

  const auto b = parse({"simulate", "wbic-normal", "--schedules", "inv-log-n,inv-n"});
  REQUIRE(b.invocation);
  CHECK(b.invocation->experiment.schedules ==
        std::vector<BetaSchedule>{BetaSchedule(ScheduleKind::InvLogN), BetaSchedule(ScheduleKind::InvN)});

  CHECK(parse({"bogus"}).exit_code == cli::kExitUsage);
  CHECK(parse({}).exit_code == cli::kExitUsage);
  CHECK(parse({"simulate", "dic-geometric", "--nope"}).exit_code == cli::kExitUsage);
  const auto bad = parse({"simulate", "dic-geometric", "--replicates", "ten"});
  CHECK(bad.exit_code == cli::kExitUsage);
  CHECK(bad.message.find("--replicates") != std::string::npos);
  const auto bad_grid = parse({"simulate", "wbic-normal", "--n-grid", "100,10"});
  CHECK(bad_grid.exit_code == cli::kExitUsage);

  const auto c = parse({"consistency", "--eps", "0.05,0.1", "--gibbs"});
  REQUIRE(c.invocation);
  CHECK(c.invocation->subcommand == cli::Subcommand::Consistency);
  CHECK(c.invocation->experiment.epsilons == std::vector<double>{0.05, 0.1});
  CHECK(c.invocation->experiment.gibbs_variants);
}

TEST_CASE("seed precedence") {
  CHECK(parse({"simulate", "laplace"}).invocation->experiment.seed == kDefaultSeed);
  CHECK(parse({"simulate", "laplace"}, "7").invocation->experiment.seed == 7);
  const auto cfg = write_file("seed.cfg", "# comment\nseed = 9\nreplicates=3  # trailing\n\n");
  const auto from_cfg = parse({"simulate", "laplace", "--config", cfg.string()}, "7");
  REQUIRE(from_cfg.invocation);
  CHECK(from_cfg.invocation->experiment.seed == 9);
  CHECK(from_cfg.invocation->experiment.replicates == 3);
  const auto from_flag = parse({"simulate", "laplace", "--config", cfg.string(), "--seed", "11"}, "7");
  CHECK(from_flag.invocation->experiment.seed == 11);
  CHECK(parse({"simulate", "laplace"}, "x").exit_code == cli::kExitUsage);

  const auto unknown = write_file("unknown.cfg", "colour = blue\n");
  CHECK(parse({"simulate", "laplace", "--config", unknown.string()}).exit_code == cli::kExitUsage);
  CHECK(parse({"simulate", "laplace", "--config", (scratch() / "missing.cfg").string()}).exit_code == cli::kExitData);
}

TEST_CASE("csv ingestion") {
  std::istringstream geo("0\n3\n1\n");
  const auto g = cli::parse_csv_sample(geo, ModelKind::Geometric, false);
  CHECK(g.size() == 3);
  CHECK(g.mean()[0] == doctest::Approx(4.0 / 3.0));

  std::istringstream nor("1.0,2.0\r\n0.0,0.0\r\n");
  const auto n = cli::parse_csv_sample(nor, ModelKind::Normal, false);
  CHECK(n.size() == 2);
  CHECK(n.cols() == 2);

  std::istringstream neg("-1\n");
  try {
    cli::parse_csv_sample(neg, ModelKind::Geometric, false);
    FAIL("expected a data error");
  } catch (const cli::DataError& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
  std::istringstream with_header("x\n2\n");
  CHECK(cli::parse_csv_sample(with_header, ModelKind::Laplace, true).size() == 1);
  std::istringstream empty("");
  CHECK_THROWS_AS(cli::parse_csv_sample(empty, ModelKind::Laplace, false), cli::DataError);
  std::istringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(cli::parse_csv_sample(ragged, ModelKind::Normal, false), cli::DataError);
}

TEST_CASE("record emission round-trips") {
  std::ostringstream empty;
  cli::write_records(empty, {});
  CHECK(empty.str() == "experiment,model,criterion,schedule,theta0,alpha,beta,n,replicate,seed,value,limit,abs_error\n");

  RunRecord r;
  r.experiment = "laplace";
  r.model = "laplace";
  r.criterion = "WBIC";
  r.schedule = "inv-log-n";
  r.theta0 = {0.1, 1.0 / 3.0};
  r.beta = 0.3;
  r.n = 12345;
  r.replicate = 4;
  r.seed = 18446744073709551615ull;
  r.value = std::nextafter(3.3862943611198908, 4.0);
  r.limit = 3.3862943611198908;
  r.abs_error = std::abs(r.value - r.limit);
  std::ostringstream os;
  const std::vector<RunRecord> recs{r};
  cli::write_records(os, recs);
  const auto ls = lines(os.str());
  REQUIRE(ls.size() == 2);
  const RunRecord back = cli::parse_record_line(ls[1]);
  CHECK(back.experiment == r.experiment);
  CHECK(back.criterion == r.criterion);
  CHECK(back.schedule == r.schedule);
  CHECK(back.theta0 == r.theta0);
  CHECK_FALSE(back.alpha);
  CHECK(back.beta == r.beta);
  CHECK(back.n == r.n);
  CHECK(back.replicate == r.replicate);
  CHECK(back.seed == r.seed);
  CHECK(back.value == r.value);
  CHECK(back.limit == r.limit);
  CHECK(back.abs_error == r.abs_error);
  CHECK(os.str().find('\r') == std::string::npos);
}

TEST_CASE("binary exit codes") {
  CHECK(spawn("--help").code == 0);
  CHECK(spawn("simulate dic-geometric --help").code == 0);
  CHECK(spawn("bogus").code == 2);
  CHECK(spawn("simulate dic-geometric --frobnicate").code == 2);
  const auto bad = spawn("simulate dic-geometric --jobs=-3");
  CHECK(bad.code == 2);
  CHECK(bad.err.find("--jobs") != std::string::npos);
  CHECK(spawn("criteria --model geometric --data " + (scratch() / "absent.csv").string()).code == 1);
  const auto empty = write_file("empty.csv", "");
  CHECK(spawn("criteria --model geometric --data " + empty.string()).code == 1);
  const auto neg = write_file("neg.csv", "-1\n");
  const auto r = spawn("criteria --model geometric --data " + neg.string());
  CHECK(r.code == 1);
  CHECK(r.err.find("row 1") != std::string::npos);
  CHECK(spawn("criteria --model geometric").code == 2);
  CHECK(spawn("simulate wbic-normal --n-grid 10 --replicates 1 --out /nonexistent-dir/x.csv").code == 1);
  CHECK(spawn("limits --model normal --params 1,1,2").code == 2);
}

TEST_CASE("limits subcommand") {
  const auto r = spawn("limits --model geometric --params 1");
  CHECK(r.code == 0);
  CHECK(r.out == "model,value\ngeometric," + cli::format_double(4.0 * std::log(2.0)) + "\n");
  CHECK(spawn("limits --model laplace --params 0.5").out == "model,value\nlaplace,2\n");
}

TEST_CASE("criteria subcommand matches library calls") {
  const auto data = write_file("geo.csv", "count\n0\n3\n1\n2\n0\n5\n1\n");
  const auto r = spawn("criteria --model geometric --header --alpha 2 --beta 3 --schedule inv-sqrt-n --data " + data.string());
  REQUIRE(r.code == 0);
  const ObservedSample s({0, 3, 1, 2, 0, 5, 1});
  const auto model = ModelSpec::geometric(2, 3);
  const auto post = power_posterior_for(model, s, 1.0);
  const double want_dic = dic(model, s, post).value;
  const double want_bpic = bpic(model, s, post).value;
  const double want_wbic = wbic(model, s, BetaSchedule(ScheduleKind::InvSqrtN)).value;
  const double want_approx = dic_geometric_approx(2, 3, 7, s.mean()[0]).value;
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 5);
  CHECK(ls[0] == "criterion,method,schedule,n,beta_n,value");
  auto value_of = [](const std::string& line) { return std::stod(line.substr(line.rfind(',') + 1)); };
  CHECK(std::abs(value_of(ls[1]) - want_dic) <= 1e-12);
  CHECK(std::abs(value_of(ls[2]) - want_bpic) <= 1e-12);
  CHECK(std::abs(value_of(ls[3]) - want_approx) <= 1e-12);
  CHECK(std::abs(value_of(ls[4]) - want_wbic) <= 1e-12);
  CHECK(ls[3].rfind("DIC,poincare,", 0) == 0);
  CHECK(ls[4].rfind("WBIC,closed-form,inv-sqrt-n,7,", 0) == 0);

  const auto nd = write_file("normal.csv", "1.0,2.0\n0.0,0.0\n0.5,-1.0\n");
  const auto rn = spawn("criteria --model normal --prior-mean 0.5,-0.5 --data " + nd.string() + " --rescale-n");
  REQUIRE(rn.code == 0);
  const ObservedSample z({1.0, 2.0, 0.0, 0.0, 0.5, -1.0}, 2);
  const auto nm = ModelSpec::normal({0.5, -0.5});
  const double w = wbic(nm, z, BetaSchedule(ScheduleKind::InvLogN)).value * 3.0 / 2.0;
  const auto nl = lines(rn.out);
  REQUIRE(nl.size() == 4);
  CHECK(std::abs(value_of(nl[3]) - w) <= 1e-12 * std::abs(w));

  const auto ld = write_file("laplace.csv", "0.1\n-0.4\n1.2\n0.0\n");
  const auto rl = spawn("criteria --model laplace --box 3,5 --grid-nodes 64 --data " + ld.string());
  REQUIRE(rl.code == 0);
  const ObservedSample l({0.1, -0.4, 1.2, 0.0});
  GridOptions grid;
  grid.nodes_2d = 64;
  const auto lm = ModelSpec::laplace(3, 5);
  const double lw = wbic(lm, l, BetaSchedule(ScheduleKind::InvLogN), grid).value;
  CHECK(std::abs(value_of(lines(rl.out)[3]) - lw) <= 1e-12);
}

TEST_CASE("output is identical across worker counts") {
  for (const std::string exp : {"simulate dic-geometric --n-grid 100,1000 --replicates 3 --theta0 0.2,0.7",
                                "simulate wbic-normal --n-grid 10,100,1000 --replicates 4",
                                "simulate laplace --n-grid 100,300 --replicates 2 --grid-nodes 32",
                                "consistency --n-grid 100,1000 --replicates 2 --gibbs"}) {
    const auto one = spawn(exp + " --seed 5 --jobs 1");
    const auto eight = spawn(exp + " --seed 5 --jobs 8");
    REQUIRE(one.code == 0);
    CHECK(one.out == eight.out);
    CHECK(one.out.size() > 100);
  }
  const auto to_file = spawn("simulate wbic-normal --n-grid 10 --replicates 1 --summary --out " + (scratch() / "s.csv").string());
  CHECK(to_file.code == 0);
  CHECK(to_file.out.empty());
  CHECK(lines(slurp(scratch() / "s.csv"))[0] == cli::kSummaryHeader);
}
