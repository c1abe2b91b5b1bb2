#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "collapselab/sim/bounds.hpp"
#include "collapselab/sim/drift.hpp"
#include "collapselab/sim/ensemble.hpp"
#include "collapselab/sim/loop.hpp"

using namespace collapselab;
using Catch::Approx;

namespace {

Categorical make_dist(std::vector<double> probs) {
  SupportPtr support = indexed_support(probs.size());
  return Categorical(std::move(support), std::move(probs));
}

}  // namespace

TEST_CASE("ideal step boundaries") {
  const Categorical p = make_dist({1.0, 0.0});
  const Categorical q = make_dist({0.0, 1.0});
  CHECK(step_ideal(p, q, 1.0).probs() == p.probs());
  CHECK(step_ideal(p, q, 0.0).probs() == q.probs());
  CHECK(step_ideal(p, q, 0.3).probs() == std::vector<double>{0.3, 0.7});
}

TEST_CASE("closed form of the idealised loop") {
  SupportPtr labels = indexed_support(6);
  const Categorical p = Categorical::random_simplex(labels, 1);
  const Categorical q0 = Categorical::random_simplex(labels, 2);

  CHECK(closed_form_ideal(p, q0, 0.5, 0).probs() == q0.probs());
  CHECK(closed_form_ideal(p, q0, 1.0, 3).probs() == p.probs());

  // (1-alpha)^t = 0.25 at alpha = 0.5, t = 2
  const Categorical expected = mix(0.75, p, q0);
  const Categorical got = closed_form_ideal(p, q0, 0.5, 2);
  for (std::size_t i = 0; i < got.size(); ++i)
    CHECK(got.prob(i) == Approx(expected.prob(i)).margin(1e-15));

  CHECK_THROWS_AS(closed_form_ideal(p, q0, 0.0, 5), InvariantError);
}

TEST_CASE("iterated ideal loop equals the closed form") {
  SupportPtr labels = indexed_support(16);
  const Categorical p = Categorical::random_simplex(labels, 11);
  const Categorical q0 = Categorical::random_simplex(labels, 12);
  const double tv0 = tv_distance(p, q0);
  for (double alpha : {0.015, 0.2, 0.9}) {
    Categorical q = q0;
    double last_kl = kl_divergence(p, q);
    for (std::size_t t = 0; t <= 1000; ++t) {
      const Categorical reference = closed_form_ideal(p, q0, alpha, t);
      for (std::size_t i = 0; i < q.size(); ++i)
        CHECK(std::abs(q.prob(i) - reference.prob(i)) <= 1e-10);
      CHECK(std::abs(tv_distance(p, q) -
                     std::pow(1.0 - alpha, static_cast<double>(t)) * tv0) <=
            1e-10);
      const double kl = kl_divergence(p, q);
      CHECK(kl <= last_kl + 1e-12);  // monotone convergence
      last_kl = kl;
      q = step_ideal(p, q, alpha);
    }
  }
}

TEST_CASE("finite-sample step") {
  SupportPtr labels = indexed_support(8);
  const Categorical p = Categorical::uniform(labels);
  const Categorical q = Categorical::random_simplex(labels, 3);

  const Categorical one = step_finite(p, q, 0.5, 1, 99);
  CHECK(one.support_size() == 1);

  // a symbol with zero mixture mass cannot gain mass from sampling
  const Categorical p0 = make_dist({0.5, 0.5, 0.0});
  const Categorical q0 = make_dist({0.25, 0.75, 0.0});
  const Categorical next = step_finite(p0, q0, 0.3, 1000, 5);
  CHECK(next.prob(2) == 0.0);

  CHECK(step_finite(p, q, 0.2, 100, 7).probs() ==
        step_finite(p, q, 0.2, 100, 7).probs());
}

TEST_CASE("missing mass after one pure self-reference step") {
  // Monte-Carlo oracle vs the binomial formula K (1 - 1/K)^n
  const std::size_t support = 50, n = 100, seeds = 1000;
  const Categorical q = Categorical::uniform(indexed_support(support));
  double total_missing = 0.0;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    const Categorical next = step_finite(q, q, 0.0, n, derive_seed(42, s));
    total_missing += static_cast<double>(support - next.support_size());
  }
  const double observed = total_missing / static_cast<double>(seeds);
  const double expected =
      50.0 * std::pow(1.0 - 1.0 / 50.0, 100.0);  // ~6.63
  CHECK(observed == Approx(expected).margin(0.4));
}

TEST_CASE("trajectory bookkeeping and ideal capacity") {
  SupportPtr labels = indexed_support(8);
  const LoopConfig config{
      .true_dist = Categorical::random_simplex(labels, 21),
      .initial_model = Categorical::random_simplex(labels, 22),
      .schedule = RateSchedule::constant(0.1),
      .sample_size = 1,
      .steps = 100,
      .master_seed = 0,
      .capacity = Capacity::infinite};
  const Trajectory trajectory = run_trajectory(config);
  REQUIRE(trajectory.records.size() == 101);
  for (std::size_t t = 0; t <= 100; ++t) CHECK(trajectory.records[t].t == t);

  const Categorical reference =
      closed_form_ideal(config.true_dist, config.initial_model, 0.1, 100);
  CHECK(trajectory.records.back().kl_bits ==
        Approx(kl_divergence(config.true_dist, reference)).margin(1e-12));
  CHECK(std::isnan(trajectory.records.back().entropy_drop));
}

TEST_CASE("pure self-reference collapses to a point mass") {
  const std::size_t seeds = 200;
  SupportPtr labels = indexed_support(50);
  const Categorical uniform = Categorical::uniform(labels);
  std::size_t collapsed = 0, support_violations = 0, absorption_violations = 0;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    std::size_t last_support = 50;
    bool absorbed = false;
    std::vector<double> absorbed_probs;
    const LoopConfig config{
        .true_dist = uniform,
        .initial_model = uniform,
        .schedule = RateSchedule::constant(0.0),
        .sample_size = 100,
        .steps = 500,
        .master_seed = derive_seed(2026, s),
        .capacity = Capacity::finite_sample};
    const Trajectory trajectory =
        run_trajectory(config, [&](std::size_t, const Categorical& q) {
          if (q.support_size() > last_support) ++support_violations;
          last_support = q.support_size();
          if (absorbed) {
            if (q.probs() != absorbed_probs) ++absorption_violations;
          } else if (q.is_point_mass()) {
            absorbed = true;
            absorbed_probs = q.probs();
          }
        });
    if (trajectory.records.back().support_size == 1) ++collapsed;
  }
  CHECK(support_violations == 0);
  CHECK(absorption_violations == 0);
  CHECK(collapsed >= seeds * 9 / 10);
}

TEST_CASE("mean drift: fixed point, random walk, restoring force") {
  // noiseless, no restoring force: frozen at mu0
  const DriftResult frozen = mean_drift_sim(
      {.mu_true = 1.0,
       .mu0 = 0.25,
       .schedule = RateSchedule::constant(0.0),
       .noise = {NoiseModel::Kind::none, 0.0},
       .steps = 50,
       .n_seeds = 8,
       .master_seed = 3});
  for (double m : frozen.mean) CHECK(m == 0.25);
  for (double v : frozen.variance) CHECK(v == 0.0);

  // random walk: Var grows like t sigma^2
  const double sigma = 0.01;
  const DriftResult walk = mean_drift_sim(
      {.mu_true = 0.0,
       .mu0 = 0.0,
       .schedule = RateSchedule::constant(0.0),
       .noise = {NoiseModel::Kind::gaussian_embedding, sigma},
       .steps = 2000,
       .n_seeds = 400,
       .master_seed = 4});
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t t = 0; t <= 2000; ++t) {
    sx += t;
    sy += walk.variance[t];
    sxx += static_cast<double>(t) * t;
    sxy += t * walk.variance[t];
  }
  const double n = 2001.0;
  const double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
  CHECK(slope == Approx(sigma * sigma).epsilon(0.10));
  CHECK(walk.variance[2000] > 2000.0 * sigma * sigma / 2.0);

  // constant restoring force saturates near sigma^2 / (1 - (1-alpha)^2)
  const DriftResult restored = mean_drift_sim(
      {.mu_true = 0.0,
       .mu0 = 0.0,
       .schedule = RateSchedule::constant(0.1),
       .noise = {NoiseModel::Kind::gaussian_embedding, sigma},
       .steps = 2000,
       .n_seeds = 500,
       .master_seed = 5});
  const double stationary = sigma * sigma / (1.0 - 0.9 * 0.9);
  CHECK(stationary == Approx(5.26e-4).epsilon(0.01));
  double tail = 0.0;
  for (std::size_t t = 1801; t <= 2000; ++t) tail += restored.variance[t];
  tail /= 200.0;
  CHECK(tail == Approx(stationary).epsilon(0.15));
  for (double v : restored.variance) CHECK(v <= 2.0 * stationary);

  CHECK_THROWS_AS(
      mean_drift_sim({.mu_true = 0.0,
                      .mu0 = 0.0,
                      .schedule = RateSchedule::constant(0.0),
                      .noise = {NoiseModel::Kind::gaussian_embedding, -1.0},
                      .steps = 10,
                      .n_seeds = 4,
                      .master_seed = 0}),
      InvariantError);
}

TEST_CASE("single-model ensemble reduces to the plain loop") {
  SupportPtr labels = indexed_support(12);
  const Categorical p = Categorical::uniform(labels);
  const Categorical q0 = Categorical::random_simplex(labels, 8);

  std::vector<std::vector<double>> single_states;
  const LoopConfig loop{
      .true_dist = p,
      .initial_model = q0,
      .schedule = RateSchedule::constant(0.2),
      .sample_size = 150,
      .steps = 30,
      .master_seed = 914,
      .capacity = Capacity::finite_sample};
  run_trajectory(loop, [&](std::size_t, const Categorical& q) {
    single_states.push_back(q.probs());
  });

  // two models, all weight on the first: model 0 must follow bit for bit
  std::vector<std::vector<double>> ensemble_states;
  const EnsembleConfig ensemble{
      .models = {q0, Categorical::random_simplex(labels, 9)},
      .weights = {1.0, 0.0},
      .schedule = RateSchedule::constant(0.2),
      .sample_size = 150,
      .steps = 30,
      .master_seed = 914};
  run_ensemble(ensemble, p,
               [&](std::size_t, const std::vector<Categorical>& models) {
                 ensemble_states.push_back(models[0].probs());
               });
  REQUIRE(single_states.size() == ensemble_states.size());
  for (std::size_t t = 0; t < single_states.size(); ++t)
    CHECK(single_states[t] == ensemble_states[t]);
}

TEST_CASE("identical models stay close under one large-sample step") {
  SupportPtr labels = indexed_support(10);
  const Categorical p = Categorical::uniform(labels);
  const Categorical q = Categorical::random_simplex(labels, 77);
  const EnsembleConfig config{
      .models = {q, q, q},
      .weights = {1.0 / 3, 1.0 / 3, 1.0 / 3},
      .schedule = RateSchedule::constant(0.0),
      .sample_size = 10000,
      .steps = 1,
      .master_seed = 31};
  const std::vector<Categorical> next = ensemble_step(config, p, 0.0, 0);
  for (std::size_t i = 0; i < next.size(); ++i)
    for (std::size_t j = i + 1; j < next.size(); ++j)
      CHECK(tv_distance(next[i], next[j]) < 0.05);
}

TEST_CASE("closed-loop ensembles settle toward consensus") {
  SupportPtr labels = indexed_support(30);
  const Categorical p = Categorical::uniform(labels);
  std::vector<double> first_tv, final_tv;
  for (std::uint64_t s = 0; s < 25; ++s) {
    const std::uint64_t run_seed = derive_seed(606, s);
    std::vector<Categorical> models;
    for (std::size_t j = 0; j < 3; ++j)
      models.push_back(fit_empirical(
          sample(p, 200, derive_seed(run_seed, 0xA11, j)), labels));
    const EnsembleConfig config{
        .models = std::move(models),
        .weights = {1.0 / 3, 1.0 / 3, 1.0 / 3},
        .schedule = RateSchedule::constant(0.0),
        .sample_size = 200,
        .steps = 150,
        .master_seed = run_seed};
    const EnsembleTrajectory trajectory = run_ensemble(config, p);
    first_tv.push_back(trajectory.records[1].tv_step);
    final_tv.push_back(trajectory.records.back().tv_step);
  }
  std::sort(first_tv.begin(), first_tv.end());
  std::sort(final_tv.begin(), final_tv.end());
  CHECK(final_tv[12] < first_tv[12]);
}

TEST_CASE("ensemble weight validation") {
  SupportPtr labels = indexed_support(4);
  const Categorical p = Categorical::uniform(labels);
  EnsembleConfig config{
      .models = {p, p},
      .weights = {0.6, 0.6},
      .schedule = RateSchedule::constant(0.0),
      .sample_size = 10,
      .steps = 1,
      .master_seed = 0};
  CHECK_THROWS_AS(config.validate(p), InvariantError);
  config.weights = {1.2, -0.2};
  CHECK_THROWS_AS(config.validate(p), InvariantError);
}

TEST_CASE("mixture self-reference bound") {
  const Categorical p = make_dist({0.5, 0.5});
  const Categorical q = make_dist({0.25, 0.75});

  CHECK(tv_mixture_bound_check(p, q, 0.0).lhs == 0.0);
  CHECK(tv_mixture_bound_check(p, q, 1.0).lhs ==
        Approx(tv_distance(p, q)).margin(1e-15));
  const TvBoundCheck derived = tv_mixture_bound_check(p, q, 0.3);
  CHECK(derived.lhs == Approx(0.075).margin(1e-15));
  CHECK(derived.holds);

  Rng rng(15);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 2 + rng.below(10);
    SupportPtr labels = indexed_support(k);
    const TvBoundCheck check = tv_mixture_bound_check(
        Categorical::random_simplex(labels, rng.next_u64()),
        Categorical::random_simplex(labels, rng.next_u64()), rng.uniform());
    CHECK(check.holds);
  }
}

TEST_CASE("information never grows through a channel") {
  JointTable correlated(indexed_support(2), indexed_support(2),
                        {0.5, 0.0, 0.0, 0.5});

  const DpiResult identity = dpi_chain(correlated, Channel::identity(2));
  CHECK(identity.i_my_bits == Approx(identity.i_mx_bits).margin(1e-12));

  const DpiResult destroyed =
      dpi_chain(correlated, Channel(2, 2, {0.5, 0.5, 0.5, 0.5}));
  CHECK(destroyed.i_my_bits <= 1e-12);

  // flip-0.1 symmetric channel on a perfectly correlated joint
  const double flip = 0.1;
  const double h2 = -flip * std::log2(flip) - (1 - flip) * std::log2(1 - flip);
  const DpiResult bsc =
      dpi_chain(correlated, Channel(2, 2, {1 - flip, flip, flip, 1 - flip}));
  CHECK(bsc.i_my_bits == Approx(1.0 - h2).margin(1e-12));

  CHECK_THROWS_AS(Channel(2, 2, {0.5, 0.4, 1.0, 0.0}), InvariantError);

  Rng rng(88);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> joint(16);
    double total = 0.0;
    for (double& v : joint) {
      v = rng.uniform();
      total += v;
    }
    for (double& v : joint) v /= total;
    std::vector<double> channel(16);
    for (std::size_t r = 0; r < 4; ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < 4; ++c) {
        channel[r * 4 + c] = rng.uniform();
        row += channel[r * 4 + c];
      }
      for (std::size_t c = 0; c < 4; ++c) channel[r * 4 + c] /= row;
    }
    const DpiResult result =
        dpi_chain(JointTable(indexed_support(4), indexed_support(4), joint),
                  Channel(4, 4, channel));
    CHECK(result.i_my_bits <= result.i_mx_bits + 1e-12);
  }
}
