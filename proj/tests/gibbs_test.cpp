#include <doctest.h>

#include <cmath>
#include <random>

#include <glmb/exhaustive.hpp>
#include <glmb/gibbs.hpp>

#include "test_util.hpp"

using glmb::AssociationArray;
using glmb::AssociationWeightTable;
using glmb::EnumeratedTarget;
using glmb::GibbsConfig;
using glmb::MarkovFactors;
using glmb::SampleBatch;
using glmb::SamplerMode;

TEST_CASE("enumeration lists every valid array exactly once") {
  const auto all = glmb::enumerate_assignments(2, {1, 1});
  // 5 cells per row, 25 pairs, 7 of them conflicting.
  CHECK(all.size() == 18);
  for (const auto& a : all) CHECK(is_positive_one_one(a));
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      CHECK_FALSE(all[i] == all[j]);

  const auto none = glmb::enumerate_assignments(0, {2});
  REQUIRE(none.size() == 1);
  CHECK(none[0].rows() == 0);

  CHECK_THROWS_AS(glmb::enumerate_assignments(12, {9, 9}), glmb::too_large);
}

TEST_CASE("the enumerated target is a probability distribution") {
  std::mt19937 rng(31);
  const AssociationWeightTable t = testutil::random_dense_table(rng, 2, {1, 1});
  const EnumeratedTarget target = exact_target(t);
  REQUIRE(target.support.size() == 18);
  double total = 0.0;
  for (double p : target.probability) {
    CHECK(p > 0.0);
    total += p;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  AssociationArray conflict(2, {1, 1});
  conflict(0, 0) = 1;
  conflict(0, 1) = 0;
  conflict(1, 0) = 1;
  conflict(1, 1) = 0;
  CHECK(target.probability_of(conflict) == 0.0);
}

TEST_CASE("single-row conditionals match the enumerated target") {
  std::mt19937 rng(123);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const AssociationWeightTable t =
        testutil::random_dense_table(rng, 2, {1, 1});
    const EnumeratedTarget target = exact_target(t);
    for (const AssociationArray& a : target.support)
      for (int n = 0; n < t.rows(); ++n) {
        const std::vector<double> got = conditional_row_dist(t, n, a);
        const std::vector<double> want =
            testutil::enumerated_conditional(target, a, n);
        REQUIRE(got.size() == want.size());
        for (std::size_t c = 0; c < got.size(); ++c)
          worst = std::max(worst, std::abs(got[c] - want[c]));
      }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("tempered conditionals match the tempered enumerated target") {
  std::mt19937 rng(321);
  const double tau = 2.5;
  const AssociationWeightTable t = testutil::random_dense_table(rng, 2, {1, 1});
  const EnumeratedTarget target = exact_target(t, tau);
  for (const AssociationArray& a : target.support)
    for (int n = 0; n < t.rows(); ++n) {
      const std::vector<double> got = conditional_row_dist(t, n, a, tau);
      const std::vector<double> want =
          testutil::enumerated_conditional(target, a, n);
      for (std::size_t c = 0; c < got.size(); ++c)
        CHECK(got[c] == doctest::Approx(want[c]).epsilon(1e-10));
    }
}

TEST_CASE("tempering rescales whole-cell weights, so tau acts on the "
          "normalized conditional too") {
  std::mt19937 rng(77);
  const AssociationWeightTable t = testutil::random_dense_table(rng, 2, {1, 1});
  const AssociationArray init = initial_association(t);
  const double tau = 3.0;
  const std::vector<double> plain = conditional_row_dist(t, 0, init);
  const std::vector<double> tempered = conditional_row_dist(t, 0, init, tau);
  double total = 0.0;
  std::vector<double> expected(plain.size(), 0.0);
  for (std::size_t c = 0; c < plain.size(); ++c) {
    expected[c] = plain[c] > 0.0 ? std::pow(plain[c], 1.0 / tau) : 0.0;
    total += expected[c];
  }
  for (std::size_t c = 0; c < plain.size(); ++c)
    CHECK(tempered[c] == doctest::Approx(expected[c] / total).epsilon(1e-12));
}

TEST_CASE("a unit temper exponent leaves conditionals bit-identical") {
  std::mt19937 rng(78);
  const AssociationWeightTable t = testutil::random_dense_table(rng, 2, {1, 1});
  const AssociationArray init = initial_association(t);
  const std::vector<double> a = conditional_row_dist(t, 0, init);
  const std::vector<double> b = conditional_row_dist(t, 0, init, 1.0);
  CHECK(a == b);
}

TEST_CASE("dense and factorized conditionals coincide on model tables") {
  const testutil::TinyInstance inst = testutil::two_sensor_instance();
  const AssociationWeightTable dense = inst.table(SamplerMode::dense);
  const AssociationWeightTable fact = inst.table(SamplerMode::factorized);
  const auto states =
      glmb::enumerate_assignments(dense.rows(), dense.sensor_sizes());

  std::mt19937 rng(9);
  std::uniform_int_distribution<std::size_t> pick(0, states.size() - 1);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const AssociationArray& a = states[pick(rng)];
    for (int n = 0; n < dense.rows(); ++n) {
      const std::vector<double> d = conditional_row_dist(dense, n, a);
      const std::vector<double> f = conditional_row_dist(fact, n, a);
      for (std::size_t c = 0; c < d.size(); ++c)
        worst = std::max(worst, std::abs(d[c] - f[c]));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("markov conditionals match the enumerated surrogate target") {
  const testutil::TinyInstance inst = testutil::two_sensor_instance();
  for (MarkovFactors factors :
       {MarkovFactors::independent, MarkovFactors::pairwise}) {
    const AssociationWeightTable t = inst.table(SamplerMode::markov, factors);
    const EnumeratedTarget target = exact_target(t, 1.0, true);
    for (const AssociationArray& a : target.support)
      for (int n = 0; n < t.rows(); ++n) {
        const std::vector<double> got = conditional_row_dist(t, n, a);
        const std::vector<double> want =
            testutil::enumerated_conditional(target, a, n);
        for (std::size_t c = 0; c < got.size(); ++c)
          CHECK(got[c] == doctest::Approx(want[c]).epsilon(1e-10));
      }
  }
}

TEST_CASE("for a single sensor the surrogate target is the exact target") {
  testutil::TinyInstance inst = testutil::two_sensor_instance();
  inst.suite.sensors.resize(1);
  inst.scan.by_sensor.resize(1);
  const AssociationWeightTable t = inst.table(SamplerMode::markov);
  const EnumeratedTarget exact = exact_target(t, 1.0, false);
  const EnumeratedTarget surrogate = exact_target(t, 1.0, true);
  REQUIRE(exact.support.size() == surrogate.support.size());
  for (std::size_t i = 0; i < exact.support.size(); ++i)
    CHECK(exact.probability[i] ==
          doctest::Approx(surrogate.probability[i]).epsilon(1e-12));
}

TEST_CASE("the surrogate target's support contains the exact support") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const testutil::TinyInstance inst = testutil::random_tiny_instance(rng);
    const AssociationWeightTable markov = inst.table(SamplerMode::markov);
    const EnumeratedTarget exact = exact_target(markov, 1.0, false);
    const EnumeratedTarget surrogate = exact_target(markov, 1.0, true);
    for (std::size_t i = 0; i < exact.support.size(); ++i)
      if (exact.probability[i] > 0.0) CHECK(surrogate.probability[i] > 0.0);
  }
}

TEST_CASE("the initial association keeps survivors at all-miss and births "
          "dropped") {
  const testutil::TinyInstance inst = testutil::two_sensor_instance();
  const AssociationWeightTable t = inst.table(SamplerMode::dense);
  const AssociationArray init = initial_association(t);
  CHECK(init.row_kept(0));
  CHECK(init(0, 0) == 0);
  CHECK(init(0, 1) == 0);
  CHECK_FALSE(init.row_kept(1));
  CHECK_FALSE(init.row_kept(2));
  CHECK(is_positive_one_one(init));
}

TEST_CASE("sampler runs are deterministic in the seed") {
  std::mt19937 rng(55);
  const AssociationWeightTable t = testutil::random_dense_table(rng, 3, {2, 2});
  GibbsConfig cfg;
  cfg.iterations = 200;
  cfg.rng_seed = 42;
  const SampleBatch a = gibbs_dense(t, initial_association(t), cfg);
  const SampleBatch b = gibbs_dense(t, initial_association(t), cfg);
  REQUIRE(a.samples.size() == b.samples.size());
  CHECK(a.counts == b.counts);
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    CHECK(a.samples[i] == b.samples[i]);
}

TEST_CASE("recorded samples are valid and counts cover every sweep") {
  std::mt19937 rng(56);
  const AssociationWeightTable t = testutil::random_dense_table(rng, 3, {2, 2});
  GibbsConfig cfg;
  cfg.iterations = 500;
  cfg.rng_seed = 7;
  const SampleBatch batch = gibbs_dense(t, initial_association(t), cfg);
  long total = 0;
  for (std::size_t i = 0; i < batch.samples.size(); ++i) {
    CHECK(is_positive_one_one(batch.samples[i]));
    CHECK(batch.counts[i] > 0);
    total += batch.counts[i];
    for (std::size_t j = i + 1; j < batch.samples.size(); ++j)
      CHECK_FALSE(batch.samples[i] == batch.samples[j]);
  }
  CHECK(total == 500);
}

TEST_CASE("dense sampling converges to the enumerated distribution") {
  for (std::uint64_t seed : {1ULL, 2ULL}) {
    std::mt19937 rng(static_cast<unsigned>(900 + seed));
    const AssociationWeightTable t =
        testutil::random_dense_table(rng, 2, {1, 1});
    GibbsConfig cfg;
    cfg.iterations = 40000;
    cfg.rng_seed = seed;
    const SampleBatch batch = gibbs_dense(t, initial_association(t), cfg);
    const double tv = testutil::total_variation(batch, exact_target(t));
    CHECK(tv < 0.05);
  }
}

TEST_CASE("factorized sampling converges to the same target") {
  const testutil::TinyInstance inst = testutil::two_sensor_instance();
  const AssociationWeightTable t = inst.table(SamplerMode::factorized);
  GibbsConfig cfg;
  cfg.iterations = 20000;
  cfg.rng_seed = 3;
  cfg.mode = SamplerMode::factorized;
  const SampleBatch batch = run_gibbs(t, initial_association(t), cfg);
  const double tv = testutil::total_variation(batch, exact_target(t));
  CHECK(tv < 0.05);
}

TEST_CASE("markov sampling converges to the surrogate target") {
  const testutil::TinyInstance inst = testutil::two_sensor_instance();
  for (MarkovFactors factors :
       {MarkovFactors::independent, MarkovFactors::pairwise}) {
    const AssociationWeightTable t = inst.table(SamplerMode::markov, factors);
    GibbsConfig cfg;
    cfg.iterations = 20000;
    cfg.rng_seed = 4;
    cfg.mode = SamplerMode::markov;
    cfg.markov_factors = factors;
    const SampleBatch batch = run_gibbs(t, initial_association(t), cfg);
    const double tv =
        testutil::total_variation(batch, exact_target(t, 1.0, true));
    CHECK(tv < 0.05);
  }
}

TEST_CASE("tempered sampling converges to the tempered target") {
  std::mt19937 rng(901);
  const AssociationWeightTable t = testutil::random_dense_table(rng, 2, {1, 1});
  GibbsConfig cfg;
  cfg.iterations = 40000;
  cfg.rng_seed = 5;
  cfg.temper_exponent = 3.0;
  const SampleBatch batch = gibbs_dense(t, initial_association(t), cfg);
  const double tv = testutil::total_variation(batch, exact_target(t, 3.0));
  CHECK(tv < 0.05);
}

TEST_CASE("the dense sampler holds the full cell buffer, the factor "
          "samplers only per-sensor ones") {
  // 2 survivors + 2 births and 9 measurements at each of 3 sensors.
  testutil::TinyInstance inst = testutil::two_sensor_instance();
  inst.parent.labels.push_back(glmb::Label{0, 1});
  inst.parent.tracks.push_back(testutil::gaussian1(1.0, 0.0, 2.0, 1.0));
  inst.suite.sensors.push_back(glmb::position_sensor({0}, 1, {2.0}, 0.5, 2.0,
                                                     {{-30.0, 30.0}}));
  inst.scan.by_sensor.assign(3, {});
  for (int s = 0; s < 3; ++s)
    for (int j = 0; j < 9; ++j)
      inst.scan.by_sensor[static_cast<std::size_t>(s)].push_back(
          Eigen::VectorXd::Constant(1, -8.0 + 2.0 * j));

  GibbsConfig cfg;
  cfg.iterations = 3;
  cfg.rng_seed = 1;

  const SampleBatch dense =
      gibbs_dense(inst.table(SamplerMode::dense),
                  initial_association(inst.table(SamplerMode::dense)), cfg);
  CHECK(dense.max_live_categories == 1001);  // 1 + 10^3

  cfg.mode = SamplerMode::factorized;
  const AssociationWeightTable ft = inst.table(SamplerMode::factorized);
  const SampleBatch fact = run_gibbs(ft, initial_association(ft), cfg);
  CHECK(fact.max_live_categories == 11);  // max(M0 + 2, Ms + 1)

  cfg.mode = SamplerMode::markov;
  const AssociationWeightTable mt = inst.table(SamplerMode::markov);
  const SampleBatch markov = run_gibbs(mt, initial_association(mt), cfg);
  CHECK(markov.max_live_categories == 11);
}

TEST_CASE("mode dispatch rejects tables built for another mode") {
  std::mt19937 rng(57);
  const AssociationWeightTable dense =
      testutil::random_dense_table(rng, 2, {1, 1});
  GibbsConfig cfg;
  cfg.iterations = 1;

  cfg.mode = SamplerMode::factorized;
  CHECK_THROWS_AS(run_gibbs(dense, initial_association(dense), cfg),
                  glmb::invalid_state);
  cfg.mode = SamplerMode::markov;
  CHECK_THROWS_AS(run_gibbs(dense, initial_association(dense), cfg),
                  glmb::invalid_state);

  const testutil::TinyInstance inst = testutil::two_sensor_instance();
  const AssociationWeightTable markov = inst.table(SamplerMode::markov);
  CHECK_THROWS_AS(gibbs_dense(markov, initial_association(markov), cfg),
                  glmb::invalid_state);
}

TEST_CASE("sampling validates its configuration and starting state") {
  std::mt19937 rng(58);
  const AssociationWeightTable t = testutil::random_dense_table(rng, 2, {1, 1});
  GibbsConfig cfg;
  cfg.iterations = 0;
  CHECK_THROWS_AS(gibbs_dense(t, initial_association(t), cfg),
                  glmb::invalid_argument);
  cfg.iterations = 1;
  cfg.temper_exponent = 0.0;
  CHECK_THROWS_AS(gibbs_dense(t, initial_association(t), cfg),
                  glmb::invalid_argument);
  cfg.temper_exponent = 1.0;

  AssociationArray wrong_shape(1, {1, 1});
  CHECK_THROWS_AS(gibbs_dense(t, wrong_shape, cfg), glmb::invalid_argument);

  AssociationArray conflict(2, {1, 1});
  conflict(0, 0) = 1;
  conflict(0, 1) = 0;
  conflict(1, 0) = 1;
  conflict(1, 1) = 0;
  CHECK_THROWS_AS(gibbs_dense(t, conflict, cfg), glmb::invalid_argument);

  CHECK_THROWS_AS(conditional_row_dist(t, 5, initial_association(t)),
                  glmb::invalid_argument);
  CHECK_THROWS_AS(conditional_row_dist(t, 0, initial_association(t), 0.0),
                  glmb::invalid_argument);
}
