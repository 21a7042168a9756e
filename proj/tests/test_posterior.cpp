#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "bayesic/errors.hpp"
#include "bayesic/posterior.hpp"
#include "bayesic/specfun.hpp"
#include "doctest.h"

using namespace bayesic;

namespace {

Box unit_box() { return Box{{Interval{0.0, 1.0}}}; }

std::vector<std::size_t> nodes(std::size_t n) { return {n}; }

double weight_sum(const GridPosterior& g) {
  return std::accumulate(g.weights.begin(), g.weights.end(), 0.0);
}

double log_beta_density(double a, double b, double t) {
  return (a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) - log_beta_function(a, b);
}

}  // namespace

TEST_CASE("beta schedules") {
  CHECK(BetaSchedule::parse("inv-log-n").evaluate(100) == doctest::Approx(1.0 / std::log(100.0)));
  CHECK(BetaSchedule::parse("inv-log-log-n").evaluate(100) == doctest::Approx(1.0 / std::log(std::log(100.0))));
  CHECK(BetaSchedule::parse("one").evaluate(7) == 1.0);
  CHECK(BetaSchedule::parse("inv-sqrt-n").evaluate(100) == doctest::Approx(0.1));
  CHECK(BetaSchedule::parse("inv-n").evaluate(100) == doctest::Approx(0.01));
  CHECK(BetaSchedule::parse("inv-n-log-n").evaluate(100) == doctest::Approx(1.0 / (100.0 * std::log(100.0))));
  CHECK_THROWS_AS(BetaSchedule::parse("nope"), ArgumentError);
  CHECK(BetaSchedule(ScheduleKind::InvLogLogN).n_min() == 3);
  CHECK(BetaSchedule(ScheduleKind::InvN).n_min() == 2);
  CHECK(BetaSchedule(ScheduleKind::One).n_min() == 1);
  CHECK_THROWS_AS(BetaSchedule(ScheduleKind::InvLogLogN).evaluate(2), ArgumentError);
  int growth = 0;
  for (auto s : BetaSchedule::all()) {
    growth += s.satisfies_growth();
    for (std::uint64_t n = s.n_min(); n < 2000; n += 7) CHECK(s.evaluate(n) > 0.0);
    CHECK(BetaSchedule::parse(s.name()) == s);
  }
  CHECK(growth == 4);
  CHECK_FALSE(BetaSchedule(ScheduleKind::InvNLogN).satisfies_growth());
}

TEST_CASE("geometric power posterior") {
  const auto p1 = geometric_power_posterior(1, 1, 10, 2.0, 1.0);
  const auto* b = p1.beta();
  REQUIRE(b);
  CHECK(b->a == 11.0);
  CHECK(b->b == 21.0);
  const auto p2 = geometric_power_posterior(2, 3, 1, 0.0, 1.0);
  CHECK(p2.beta()->a == 3.0);
  CHECK(p2.beta()->b == 3.0);
  const auto p3 = geometric_power_posterior(1, 1, 4, 1.0, 0.5);
  CHECK(p3.beta()->a == 3.0);
  CHECK(p3.beta()->b == 3.0);
  CHECK(p3.temperature() == 0.5);
}

TEST_CASE("normal power posterior") {
  const auto p = normal_power_posterior(std::vector<double>{0.0}, 1, std::vector<double>{0.0}, 1.0);
  CHECK(p.normal()->mean[0] == 0.0);
  CHECK(p.normal()->variance == 0.5);
  const auto q = normal_power_posterior(std::vector<double>{0.0}, 1000000, std::vector<double>{1.0}, 1.0);
  CHECK(std::abs(q.normal()->mean[0] - 1.0) <= 1e-6);
  CHECK(q.normal()->variance == doctest::Approx(1e-6).epsilon(1e-5));
  const auto r = normal_power_posterior(std::vector<double>{5.0}, 1, std::vector<double>{0.0}, 1e-12);
  CHECK(r.normal()->mean[0] == doctest::Approx(5.0).epsilon(1e-11));
  CHECK(r.normal()->variance == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("grid posterior examples") {
  const auto flat = grid_posterior([](std::span<const double>) { return 0.0; }, unit_box(), nodes(64));
  for (double w : flat.grid()->weights) CHECK(w == doctest::Approx(1.0 / 64).epsilon(1e-15));

  const auto beta = grid_posterior([](std::span<const double> t) { return log_beta_density(11, 21, t[0]); },
                                   unit_box(), nodes(10000));
  CHECK(std::abs(posterior_mean(beta)[0] - 11.0 / 32.0) <= 1e-6);

  const auto bumps = grid_posterior(
      [](std::span<const double> t) {
        return std::log(std::exp(-50 * (t[0] - 0.2) * (t[0] - 0.2)) + std::exp(-50 * (t[0] - 0.8) * (t[0] - 0.8)));
      },
      unit_box(), nodes(1000));
  CHECK(std::abs(posterior_mean(bumps)[0] - 0.5) <= 1e-12);
}

TEST_CASE("grid posterior errors") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(grid_posterior([&](std::span<const double>) { return -inf; }, unit_box(), nodes(32)),
                  DegenerateKernelError);
  CHECK_THROWS(grid_posterior([](std::span<const double>) { return std::nan(""); }, unit_box(), nodes(32)));
  CHECK_THROWS(grid_posterior([](std::span<const double>) { return 0.0; }, unit_box(), nodes(8)));
  const auto half = grid_posterior([&](std::span<const double> t) { return t[0] < 0.5 ? -inf : 0.0; }, unit_box(), nodes(32));
  CHECK(posterior_mean(half)[0] == doctest::Approx(0.75));
}

TEST_CASE("grid weights normalize under large kernel offsets") {
  for (double offset : {-1e5, -1e3, 0.0, 1e3, 1e5}) {
    const auto p = grid_posterior([&](std::span<const double> t) { return offset - 40.0 * t[0] * t[0]; },
                                  unit_box(), nodes(4096));
    CHECK(std::abs(weight_sum(*p.grid()) - 1.0) <= 1e-12);
    for (double w : p.grid()->weights) CHECK(w >= 0.0);

    const Box box{{Interval{-1.0, 1.0}, Interval{0.5, 2.0}}};
    const std::vector<std::size_t> n2{64, 48};
    const auto q = grid_posterior([&](std::span<const double> t) { return offset + t[0] - t[1] * t[1]; }, box, n2);
    CHECK(std::abs(weight_sum(*q.grid()) - 1.0) <= 1e-12);
    CHECK(q.grid()->size() == 64u * 48u);
  }
}

TEST_CASE("grid node layout is row-major") {
  const Box box{{Interval{0.0, 1.0}, Interval{0.0, 2.0}}};
  const std::vector<std::size_t> n2{16, 32};
  const auto p = grid_posterior([](std::span<const double>) { return 0.0; }, box, n2);
  const auto n1 = p.grid()->node(1);
  CHECK(n1[0] == doctest::Approx(0.5 / 16));
  CHECK(n1[1] == doctest::Approx(1.5 * 2.0 / 32));
  const auto n32 = p.grid()->node(32);
  CHECK(n32[0] == doctest::Approx(1.5 / 16));
  CHECK(n32[1] == doctest::Approx(0.5 * 2.0 / 32));
}

TEST_CASE("posterior means and expectations") {
  CHECK(posterior_mean(PowerPosterior(BetaPosterior{2, 2}))[0] == 0.5);
  CHECK(std::abs(posterior_mean(PowerPosterior(BetaPosterior{11, 21}))[0] - 0.34375) <= 1e-14);
  CHECK(posterior_mean(PowerPosterior(NormalPosterior{{1.0, -1.0}, 0.3})) == Theta{1.0, -1.0});

  CHECK(posterior_expect(PowerPosterior(BetaPosterior{1, 1}), Functional::log_theta()) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(posterior_expect(PowerPosterior(NormalPosterior{{0.0}, 1.0}), Functional::squared_coordinate()) == 1.0);
  CHECK(posterior_expect(PowerPosterior(NormalPosterior{{1.0, 2.0}, 0.5}), Functional::squared_norm()) == 6.0);
  CHECK_THROWS_AS(posterior_expect(PowerPosterior(BetaPosterior{1, 1}),
                                   Functional::custom([](std::span<const double> t) { return t[0]; })),
                  UnsupportedFunctionalError);
  CHECK_THROWS(PowerPosterior(BetaPosterior{0.0, 1.0}));
  CHECK_THROWS(PowerPosterior(NormalPosterior{{0.0}, 0.0}));

  const PowerPosterior closed(BetaPosterior{11, 21});
  const auto grid = grid_posterior([](std::span<const double> t) { return log_beta_density(11, 21, t[0]); },
                                   unit_box(), nodes(100000));
  CHECK(std::abs(posterior_expect(closed, Functional::log_theta()) - posterior_expect(grid, Functional::log_theta())) <= 1e-6);
}

TEST_CASE("beta posterior mean is exact") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.1, 1e4);
  for (int i = 0; i < 200; ++i) {
    const double a = u(gen), b = u(gen);
    CHECK(std::abs(posterior_mean(PowerPosterior(BetaPosterior{a, b}))[0] - a / (a + b)) <= 1e-14);
  }
}

TEST_CASE("ball mass examples") {
  const PowerPosterior b(BetaPosterior{11, 21});
  CHECK(ball_mass(b, std::vector<double>{0.5}, 1.0) == 1.0);
  CHECK(ball_mass(b, std::vector<double>{11.0 / 32}, 1e-9) < 1e-6);
  const PowerPosterior n(NormalPosterior{{0.0}, 0.01});
  CHECK(ball_mass(n, std::vector<double>{0.0}, 0.3) == doctest::Approx(0.99730).epsilon(1e-4));
  const auto flat = grid_posterior([](std::span<const double>) { return 0.0; }, unit_box(), nodes(64));
  CHECK(ball_mass(flat, std::vector<double>{0.5}, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ball_mass(flat, std::vector<double>{0.5}, 0.25) == doctest::Approx(0.5).epsilon(1e-14));

  // Two-dimensional normal: mass of a radius-r disc is 1 - exp(-r^2 / (2v)).
  const PowerPosterior n2(NormalPosterior{{1.0, -1.0}, 0.04});
  CHECK(ball_mass(n2, std::vector<double>{1.0, -1.0}, 0.3) == doctest::Approx(1.0 - std::exp(-0.09 / 0.08)).epsilon(1e-10));
}

TEST_CASE("ball mass of the normal off-center agrees with a grid") {
  const PowerPosterior n2(NormalPosterior{{0.2, 0.0}, 0.05});
  const Box box{{Interval{0.2 - 2.0, 0.2 + 2.0}, Interval{-2.0, 2.0}}};
  const std::vector<std::size_t> n{800, 800};
  const auto g = grid_posterior(
      [](std::span<const double> t) { return -((t[0] - 0.2) * (t[0] - 0.2) + t[1] * t[1]) / 0.1; }, box, n);
  CHECK(ball_mass(n2, std::vector<double>{0.0, 0.1}, 0.4) ==
        doctest::Approx(ball_mass(g, std::vector<double>{0.0, 0.1}, 0.4)).epsilon(5e-3));
}

TEST_CASE("closed-form and grid geometric posteriors agree") {
  std::mt19937_64 gen(32);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto model = ModelSpec::geometric(1.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    const std::uint64_t n = 5 + static_cast<std::uint64_t>(u(gen) * 495);
    const double theta0 = 0.1 + 0.8 * u(gen);
    std::vector<double> x(n);
    for (auto& v : x) v = std::floor(std::log(u(gen) + 1e-300) / std::log1p(-theta0));
    const ObservedSample s(x);
    for (double beta_n : {1.0, 1.0 / std::log(static_cast<double>(n))}) {
      const auto closed = geometric_power_posterior(1, 1, n, s.mean()[0], beta_n);
      const auto grid = power_grid_posterior(model, s, beta_n, unit_box(), nodes(20000));
      CHECK(std::abs(posterior_mean(closed)[0] - posterior_mean(grid)[0]) <= 1e-5);
      CHECK(std::abs(posterior_expect(closed, Functional::log_theta()) - posterior_expect(grid, Functional::log_theta())) <= 1e-5);
      CHECK(std::abs(posterior_expect(closed, Functional::log_one_minus_theta()) -
                     posterior_expect(grid, Functional::log_one_minus_theta())) <= 1e-5);
      const double c = posterior_mean(closed)[0];
      CHECK(std::abs(ball_mass(closed, std::vector<double>{c}, 0.05) - ball_mass(grid, std::vector<double>{c}, 0.05)) <= 1e-5);
    }
  }
}

TEST_CASE("ball mass grows along a geometric sample path") {
  int monotone = 0;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    std::mt19937_64 gen(1000 + rep);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x;
    double prev = 0.0;
    bool ok = true;
    double last = 0.0;
    for (std::uint64_t n : {100u, 1000u, 10000u, 100000u}) {
      while (x.size() < n) x.push_back(std::floor(std::log(1.0 - u(gen)) / std::log(0.5)));
      const ObservedSample s(x);
      const double beta_n = 1.0 / std::log(static_cast<double>(n));
      const auto post = geometric_power_posterior(1, 1, n, s.mean()[0], beta_n);
      last = ball_mass(post, std::vector<double>{0.5}, 0.05);
      ok = ok && last >= prev;
      prev = last;
    }
    monotone += ok;
    CHECK(last >= 0.99);
  }
  CHECK(monotone >= 9);
}

TEST_CASE("gibbs posterior") {
  const auto flat = gibbs_posterior([](std::span<const double>) { return 0.0; }, 5.0, unit_box(), nodes(32));
  for (double w : flat.grid()->weights) CHECK(w == doctest::Approx(1.0 / 32).epsilon(1e-14));

  const ThetaFn quad = [](std::span<const double> t) { return -(t[0] - 0.3) * (t[0] - 0.3); };
  const auto sharp = gibbs_posterior(quad, 1e4, unit_box(), nodes(4096));
  CHECK(ball_mass(sharp, std::vector<double>{0.3}, 0.05) >= 0.99);

  const ObservedSample s({0.0, 1.0, 3.0, 0.0, 2.0, 1.0, 1.0, 0.0});
  const auto model = ModelSpec::geometric();
  const AverageLoglik f(model, s);
  const auto g = gibbs_posterior([&](std::span<const double> t) { return f(t); }, static_cast<double>(s.size()),
                                 unit_box(), nodes(20000));
  const auto closed = geometric_power_posterior(1, 1, s.size(), s.mean()[0], 1.0);
  CHECK(std::abs(posterior_mean(g)[0] - posterior_mean(closed)[0]) <= 1e-6);
  CHECK(std::abs(posterior_expect(g, Functional::squared_coordinate()) -
                 posterior_expect(closed, Functional::squared_coordinate())) <= 1e-6);
}

TEST_CASE("eta-rescaled posterior") {
  const ThetaFn quad = [](std::span<const double> t) { return -(t[0] - 0.3) * (t[0] - 0.3); };
  const auto g = gibbs_posterior(quad, 30.0, unit_box(), nodes(4096));
  const auto e0 = eta_rescaled_posterior(quad, 30.0, 0, unit_box(), nodes(4096));
  const auto& wg = g.grid()->weights;
  const auto& we = e0.grid()->weights;
  REQUIRE(wg.size() == we.size());
  CHECK(std::memcmp(wg.data(), we.data(), wg.size() * sizeof(double)) == 0);

  // Cubing flattens the kernel where |gamma*u| < 1, so at gamma = 30 the k = 1 ball is lighter.
  const auto e1 = eta_rescaled_posterior(quad, 30.0, 1, unit_box(), nodes(4096));
  double inside = 0.0, total = 0.0;
  for (std::size_t i = 0; i < 4096; ++i) {
    const double t = (i + 0.5) / 4096.0;
    const double k = std::exp(std::pow(30.0 * quad(std::vector<double>{t}), 3));
    total += k;
    const double overlap = std::min(0.35, t + 0.5 / 4096) - std::max(0.25, t - 0.5 / 4096);
    if (overlap > 0.0) inside += k * std::min(1.0, overlap * 4096);
  }
  CHECK(ball_mass(e1, std::vector<double>{0.3}, 0.05) == doctest::Approx(inside / total).epsilon(1e-12));
  CHECK(ball_mass(e1, std::vector<double>{0.3}, 0.05) < ball_mass(g, std::vector<double>{0.3}, 0.05));

  // Once |gamma*u| > 1 outside the ball the rescaled kernel is sharper.
  const auto g_hi = gibbs_posterior(quad, 3000.0, unit_box(), nodes(4096));
  const auto e_hi = eta_rescaled_posterior(quad, 3000.0, 1, unit_box(), nodes(4096));
  CHECK(ball_mass(e_hi, std::vector<double>{0.3}, 0.05) > ball_mass(g_hi, std::vector<double>{0.3}, 0.05));

  const auto c3 = eta_rescaled_posterior([](std::span<const double>) { return -2.0; }, 3.0, 3, unit_box(), nodes(64));
  for (double w : c3.grid()->weights) CHECK(w == doctest::Approx(1.0 / 64).epsilon(1e-14));
}

TEST_CASE("AUI tail diagnostic") {
  const auto flat = grid_posterior([](std::span<const double>) { return 0.0; }, unit_box(), nodes(64));
  const std::vector<double> two{2.0};
  CHECK(aui_tail_diagnostic(flat, [](std::span<const double> t) { return std::sin(10 * t[0]); }, two)[0].second == 0.0);
  const std::vector<double> small{0.5, 3.0};
  const auto c = aui_tail_diagnostic(flat, [](std::span<const double>) { return -3.0; }, small);
  CHECK(c[0].second == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(c[1].second == doctest::Approx(3.0).epsilon(1e-14));

  std::mt19937_64 gen(33);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(100);
  for (auto& v : x) v = std::floor(std::log(u(gen)) / std::log(0.5));
  const ObservedSample s(x);
  const auto model = ModelSpec::geometric();
  const auto post = power_grid_posterior(model, s, 1.0, unit_box(), nodes(4096));
  const AverageLoglik f(model, s);
  const std::vector<double> deltas{5.0, 10.0, 20.0};
  const auto curve = aui_tail_diagnostic(post, [&](std::span<const double> t) { return -2.0 * f(t); }, deltas);
  REQUIRE(curve.size() == 3);
  CHECK(curve[1].second <= curve[0].second);
  CHECK(curve[2].second <= curve[1].second);
  CHECK(curve[2].second <= curve[0].second);
  CHECK_THROWS(aui_tail_diagnostic(PowerPosterior(BetaPosterior{2, 2}), [](std::span<const double>) { return 0.0; }, deltas));
}

TEST_CASE("quasiconcavity check") {
  std::mt19937_64 gen(34);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(40);
  for (auto& v : x) v = std::floor(std::log(u(gen)) / std::log(0.6));
  const ObservedSample s(x);
  const auto model = ModelSpec::geometric();
  const Box inner{{Interval{1e-6, 1.0 - 1e-6}}};
  const auto pass = quasiconcavity_check([&](std::span<const double> t) { return avg_loglik(model, s, t); }, inner, 1000, 1e-12);
  CHECK(pass.passed);
  CHECK(pass.triples_checked == 1000);
  CHECK_FALSE(pass.counterexample);

  const auto fail = quasiconcavity_check([](std::span<const double> t) { return (t[0] - 0.5) * (t[0] - 0.5); }, unit_box(), 1000, 1e-12);
  CHECK_FALSE(fail.passed);
  REQUIRE(fail.counterexample);
  CHECK(fail.counterexample->value_at_mix < fail.counterexample->min_endpoint_value - 1e-12);

  CHECK(quasiconcavity_check([](std::span<const double>) { return 1.0; }, unit_box(), 500, 0.0).passed);
}
