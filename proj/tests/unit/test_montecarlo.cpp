#include <doctest.h>

#include <cmath>

#include "qisac/angles.hpp"
#include "qisac/errors.hpp"
#include "qisac/montecarlo.hpp"
#include "qisac/scoring.hpp"

using namespace qisac;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.params = ChannelParams{10.0, 0.8, 3.0, deg_to_rad(45.0)};
  spec.algo.gamma_min = 0.6;
  spec.algo.gamma_is_fraction = true;
  spec.algo.t_max = 15;
  spec.algo.psi0 = kPi / 2.0;
  spec.n_block = 200;
  spec.trials = 4;
  spec.seed = 42;
  spec.threads = 1;
  return spec;
}

}  // namespace

TEST_CASE("score_ber resolves the label ambiguity") {
  using S = Symbol;
  const std::vector<S> truth{S::Zero, S::One, S::One, S::Zero};
  CHECK(score_ber(truth, truth).ber == 0.0);

  std::vector<S> inverted;
  for (S s : truth) inverted.push_back(flip(s));
  const BerScore inv = score_ber(inverted, truth);
  CHECK(inv.ber == 0.0);
  CHECK(inv.flipped);
  CHECK(score_ber_strict(inverted, truth) == 1.0);

  const std::vector<S> one_off{S::One, S::One, S::One, S::Zero};
  CHECK(score_ber(one_off, truth).ber == 0.25);
  CHECK_FALSE(score_ber(one_off, truth).flipped);

  const std::vector<S> half{S::One, S::Zero, S::One, S::Zero};
  CHECK(score_ber(half, truth).ber == 0.5);
  CHECK_FALSE(score_ber(half, truth).flipped);

  CHECK_THROWS_AS(score_ber(std::vector<S>{S::One}, truth), ConfigError);
  CHECK_THROWS_AS(score_ber(std::vector<S>{}, std::vector<S>{}), ConfigError);
}

TEST_CASE("quantile band") {
  const Band b = quantile_band({5.0, 1.0, 3.0, 2.0, 4.0});
  CHECK(b.median == 3.0);
  CHECK(b.q25 == 2.0);
  CHECK(b.q75 == 4.0);
  const Band even = quantile_band({1.0, 2.0, 3.0, 4.0});
  CHECK(even.median == 2.5);
  CHECK(even.q25 == doctest::Approx(1.75));
  const Band single = quantile_band({7.0});
  CHECK(single.median == 7.0);
  CHECK(single.q25 == 7.0);
}

TEST_CASE("steady state averages the trailing window") {
  RunTrace tr;
  tr.n_block = 10;
  for (int i = 0; i < 10; ++i) {
    IterationRecord r;
    r.iter = i;
    r.ber_emp = i < 8 ? 0.5 : 0.1;
    r.fc = i;
    r.psi = i < 8 ? 1.0 : kPi - 0.01;
    r.theta_hat = 0.01;
    tr.records.push_back(r);
  }
  const SteadyState s = steady_state(tr, 0.2);
  CHECK(s.window == 2);
  CHECK(s.symbols == 20);
  CHECK(s.ber_emp == doctest::Approx(0.1));
  CHECK(s.fc == doctest::Approx(8.5));
  CHECK(s.psi == doctest::Approx(kPi - 0.01));
}

TEST_CASE("steady state wraps angles modulo π") {
  RunTrace tr;
  tr.n_block = 1;
  for (double psi : {0.02, kPi - 0.02}) {
    IterationRecord r;
    r.psi = psi;
    r.theta_hat = psi;
    tr.records.push_back(r);
  }
  const SteadyState s = steady_state(tr, 1.0);
  CHECK(std::min(s.psi, kPi - s.psi) < 1e-12);
}

TEST_CASE("convergence experiment is deterministic and thread-count independent") {
  ExperimentSpec spec = small_spec();
  const ConvergenceResult a = run_convergence_experiment(spec);
  spec.threads = 3;
  const ConvergenceResult b = run_convergence_experiment(spec);
  REQUIRE(a.trials.size() == 4);
  REQUIRE(b.trials.size() == 4);
  CHECK(a.failed() == 0);
  for (std::size_t k = 0; k < 4; ++k) {
    REQUIRE(a.trials[k].trace);
    REQUIRE(b.trials[k].trace);
    CHECK(a.trials[k].seed == b.trials[k].seed);
    const auto& ra = a.trials[k].trace->records;
    const auto& rb = b.trials[k].trace->records;
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
      CHECK(ra[i].psi == rb[i].psi);
      CHECK(ra[i].theta_hat == rb[i].theta_hat);
      CHECK(ra[i].ber_emp == rb[i].ber_emp);
    }
  }
  CHECK(a.gamma_min == doctest::Approx(0.6 * a.fc_max));
  CHECK(a.steady.size() == 4);
  CHECK(a.per_iteration.size() == 15);
  CHECK(a.per_iteration.front().trials == 4);
}

TEST_CASE("a trial's result depends only on its own seed") {
  ExperimentSpec spec = small_spec();
  const ConvergenceResult four = run_convergence_experiment(spec);
  spec.trials = 2;
  const ConvergenceResult two = run_convergence_experiment(spec);
  for (std::size_t k = 0; k < 2; ++k)
    CHECK(four.trials[k].trace->psi_hat == two.trials[k].trace->psi_hat);
  spec.seed = 43;
  const ConvergenceResult other = run_convergence_experiment(spec);
  CHECK(other.trials[0].seed != two.trials[0].seed);
}

TEST_CASE("tradeoff sweep bookkeeping") {
  ExperimentSpec spec = small_spec();
  spec.trials = 2;
  spec.algo.t_max = 5;
  spec.sweep = {SweepPoint{0.0, 3.0, 100}, SweepPoint{0.5, 1.0, 100}};
  const TradeoffCurve c = run_tradeoff_sweep(spec);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[0].gamma_min == 0.0);
  CHECK(c.points[0].phi_star == 0.0);
  CHECK(c.points[1].gamma_min == doctest::Approx(0.5 * c.points[1].fc_max));
  CHECK(c.points[1].ber_theory_known_theta > 0.0);
  for (const auto& p : c.points) {
    CHECK(p.trials_ok == 2);
    CHECK_FALSE(p.infeasible);
    CHECK(p.ber_sim >= 0.0);
    CHECK(p.ber_sim <= 0.5);
  }
  spec.sweep.clear();
  CHECK_THROWS_AS(run_tradeoff_sweep(spec), ConfigError);
}

TEST_CASE("ExperimentSpec validation") {
  ExperimentSpec spec = small_spec();
  CHECK_NOTHROW(spec.validate());
  spec.trials = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = small_spec();
  spec.steady_fraction = 0.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = small_spec();
  spec.sweep = {SweepPoint{1.5, 3.0, 10}};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("reflected lock detection") {
  SteadyState s;
  s.theta_hat = deg_to_rad(31.0);
  CHECK_FALSE(is_reflected_lock(s, deg_to_rad(30.0)));
  s.theta_hat = deg_to_rad(150.0);
  CHECK(is_reflected_lock(s, deg_to_rad(30.0)));
  s.theta_hat = deg_to_rad(178.0);
  CHECK_FALSE(is_reflected_lock(s, deg_to_rad(1.0)));
}
