#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <glmb/kalman.hpp>
#include <glmb/weights.hpp>

#include "test_util.hpp"

using glmb::AssociationArray;
using glmb::AssociationWeightTable;
using glmb::DetectionFactor;
using glmb::Label;
using glmb::MarkovFactors;
using glmb::SamplerMode;

namespace {

std::vector<int> tuple_of_cell(const std::vector<int>& sizes, std::size_t c) {
  AssociationArray a(1, sizes);
  a.set_row_cell(0, c);
  std::vector<int> tuple(sizes.size());
  for (int s = 0; s < a.sensors(); ++s)
    tuple[static_cast<std::size_t>(s)] = a(0, s);
  return tuple;
}

}  // namespace

TEST_CASE("mode names round-trip through their string forms") {
  for (SamplerMode m : {SamplerMode::dense, SamplerMode::factorized,
                        SamplerMode::markov})
    CHECK(glmb::sampler_mode_from_string(glmb::to_string(m)) == m);
  for (MarkovFactors f : {MarkovFactors::independent, MarkovFactors::pairwise})
    CHECK(glmb::markov_factors_from_string(glmb::to_string(f)) == f);
  CHECK_THROWS_AS(glmb::sampler_mode_from_string("nope"),
                  glmb::invalid_argument);
  CHECK_THROWS_AS(glmb::markov_factors_from_string("nope"),
                  glmb::invalid_argument);
}

TEST_CASE("model tables order survivor rows before birth rows") {
  const testutil::TinyInstance t = testutil::two_sensor_instance();
  const AssociationWeightTable table = t.table(SamplerMode::dense);

  REQUIRE(table.rows() == 3);
  CHECK(table.sensor_sizes() == std::vector<int>{2, 1});
  CHECK(table.cell_count() == 7);  // 1 + 3 * 2

  CHECK(table.row(0).label == Label{0, 0});
  CHECK_FALSE(table.row(0).is_birth);
  CHECK(table.row(0).keep_prob == doctest::Approx(0.9));
  CHECK(table.row(0).drop_weight == doctest::Approx(0.1));
  const glmb::Gaussian predicted =
      kalman_predict(t.parent.tracks[0], t.motion);
  CHECK(table.row(0).predicted.mean.isApprox(predicted.mean));
  CHECK(table.row(0).predicted.cov.isApprox(predicted.cov));

  for (int i = 1; i <= 2; ++i) {
    CHECK(table.row(i).label == Label{1, i - 1});
    CHECK(table.row(i).is_birth);
    const auto& entry = t.birth.entries[static_cast<std::size_t>(i - 1)];
    CHECK(table.row(i).keep_prob == doctest::Approx(entry.prob));
    CHECK(table.row(i).drop_weight == doctest::Approx(1.0 - entry.prob));
    CHECK(table.row(i).predicted.mean.isApprox(entry.density.mean));
  }

  const std::vector<Label> labels = table.labels();
  CHECK(labels == std::vector<Label>{{0, 0}, {1, 0}, {1, 1}});
}

TEST_CASE("dense cells equal independently chained row weights") {
  const testutil::TinyInstance t = testutil::two_sensor_instance();
  const AssociationWeightTable table = t.table(SamplerMode::dense);

  for (int i = 0; i < table.rows(); ++i) {
    const auto& cells = table.dense_cells(i);
    REQUIRE(cells.size() == table.cell_count());
    CHECK(cells[0] == doctest::Approx(table.row(i).drop_weight));
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const std::vector<int> tuple = tuple_of_cell(table.sensor_sizes(), c);
      const DetectionFactor f =
          association_chain(table.row(i).predicted, t.suite, tuple, t.scan);
      CHECK(cells[c] ==
            doctest::Approx(table.row(i).keep_prob * f.weight).epsilon(1e-9));
      CHECK(table.row_weight(i, tuple) ==
            doctest::Approx(cells[c]).epsilon(1e-9));
    }
  }
}

TEST_CASE("a hit cell equals the closed-form marginal likelihood") {
  // Single sensor so the cell weight has a textbook closed form:
  // keep * P_D * N(z; H m, H P H' + R) / kappa.
  testutil::TinyInstance t = testutil::two_sensor_instance();
  t.suite.sensors.resize(1);
  t.scan.by_sensor.resize(1);
  const AssociationWeightTable table = t.table(SamplerMode::dense);
  const glmb::SensorModel& sensor = t.suite.sensors[0];
  const double kappa = sensor.clutter_rate / sensor.region_volume();

  for (int i = 0; i < table.rows(); ++i) {
    const glmb::Gaussian& g = table.row(i).predicted;
    const double var =
        (sensor.H * g.cov * sensor.H.transpose())(0, 0) + sensor.R(0, 0);
    for (int j = 1; j <= 2; ++j) {
      const double z = t.scan.by_sensor[0][static_cast<std::size_t>(j - 1)](0);
      const double residual = z - (sensor.H * g.mean)(0);
      const double marginal = std::exp(-0.5 * residual * residual / var) /
                              std::sqrt(2.0 * M_PI * var);
      const double expected = table.row(i).keep_prob * sensor.detect_prob *
                              marginal / kappa;
      CHECK(table.row_weight(i, {j}) ==
            doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("log row weights agree with the linear ones") {
  const testutil::TinyInstance t = testutil::two_sensor_instance();
  const AssociationWeightTable table = t.table(SamplerMode::factorized);
  for (int i = 0; i < table.rows(); ++i)
    for (std::size_t c = 1; c < table.cell_count(); ++c) {
      const std::vector<int> tuple = tuple_of_cell(table.sensor_sizes(), c);
      CHECK(table.log_row_weight(i, tuple) ==
            doctest::Approx(std::log(table.row_weight(i, tuple)))
                .epsilon(1e-12));
    }
}

TEST_CASE("synthetic dense tables reproduce their cells") {
  std::mt19937 rng(5);
  const std::vector<int> sizes = {2, 1};
  const AssociationWeightTable table =
      testutil::random_dense_table(rng, 2, sizes);

  CHECK(table.mode() == SamplerMode::dense);
  CHECK(table.rows() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(table.row(i).label == Label{0, i});
    CHECK(table.row(i).keep_prob == 1.0);
    CHECK_FALSE(table.row(i).is_birth);
    const auto& cells = table.dense_cells(i);
    CHECK(table.row(i).drop_weight == cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const std::vector<int> tuple = tuple_of_cell(sizes, c);
      CHECK(table.row_weight(i, tuple) == cells[c]);
      CHECK(table.log_row_weight(i, tuple) == std::log(cells[c]));
    }
  }
  CHECK_THROWS_AS(table.row_weight(0, {0}), glmb::invalid_argument);
  CHECK_THROWS_AS(table.row_weight(0, {3, 0}), glmb::invalid_argument);
  CHECK_THROWS_AS(table.surrogate_row_weight(0, {0, 0}), glmb::invalid_state);
}

TEST_CASE("synthetic tables validate their cell arrays") {
  using Cells = std::vector<std::vector<double>>;
  CHECK_THROWS_AS(AssociationWeightTable::from_dense({}, Cells{}),
                  glmb::invalid_argument);
  CHECK_THROWS_AS(AssociationWeightTable::from_dense({-1}, Cells{}),
                  glmb::invalid_argument);
  // 1 sensor, M = 1: rows need 1 + 2 = 3 cells.
  CHECK_THROWS_AS(AssociationWeightTable::from_dense({1}, {{1.0, 2.0}}),
                  glmb::invalid_argument);
  CHECK_THROWS_AS(AssociationWeightTable::from_dense({1}, {{1.0, 0.0, 2.0}}),
                  glmb::invalid_argument);
  CHECK_THROWS_AS(
      AssociationWeightTable::from_dense({1}, {{1.0, -2.0, 2.0}}),
      glmb::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(AssociationWeightTable::from_dense({1}, {{1.0, inf, 2.0}}),
                  glmb::invalid_argument);
  CHECK_NOTHROW(AssociationWeightTable::from_dense({1}, {{1.0, 0.5, 2.0}}));
}

TEST_CASE("markov factor tables mirror single-sensor detection factors") {
  const testutil::TinyInstance t = testutil::two_sensor_instance();
  const AssociationWeightTable table =
      t.table(SamplerMode::markov, MarkovFactors::independent);

  for (int i = 0; i < table.rows(); ++i) {
    const glmb::Gaussian& predicted = table.row(i).predicted;
    for (int s = 0; s < table.sensors(); ++s) {
      const auto& sensor = t.suite.sensors[static_cast<std::size_t>(s)];
      const auto& zs = t.scan.by_sensor[static_cast<std::size_t>(s)];
      CHECK(table.surrogate_factor(i, s, 0) ==
            doctest::Approx(1.0 - sensor.detect_prob));
      for (int j = 1; j <= static_cast<int>(zs.size()); ++j) {
        const DetectionFactor f = detection_factor(predicted, sensor, j, zs);
        CHECK(table.surrogate_factor(i, s, j) ==
              doctest::Approx(f.weight).epsilon(1e-9));
      }
    }
    // The surrogate row weight is the product of the per-sensor factors.
    for (std::size_t c = 1; c < table.cell_count(); ++c) {
      const std::vector<int> tuple = tuple_of_cell(table.sensor_sizes(), c);
      double expected = table.row(i).keep_prob;
      for (int s = 0; s < table.sensors(); ++s)
        expected *= table.surrogate_factor(i, s, tuple[static_cast<std::size_t>(s)]);
      CHECK(table.surrogate_row_weight(i, tuple) == doctest::Approx(expected));
    }
  }
  CHECK_THROWS_AS(table.surrogate_pair_factor(0, 1, 0, 0),
                  glmb::invalid_state);
  CHECK_THROWS_AS(table.dense_cells(0), glmb::invalid_state);
}

TEST_CASE("pairwise factors condition on the previous sensor's choice") {
  const testutil::TinyInstance t = testutil::two_sensor_instance();
  const AssociationWeightTable table =
      t.table(SamplerMode::markov, MarkovFactors::pairwise);

  for (int i = 0; i < table.rows(); ++i) {
    const glmb::Gaussian& predicted = table.row(i).predicted;
    const auto& prev_sensor = t.suite.sensors[0];
    const auto& prev_zs = t.scan.by_sensor[0];
    const auto& sensor = t.suite.sensors[1];
    const auto& zs = t.scan.by_sensor[1];
    for (int jp = 0; jp <= static_cast<int>(prev_zs.size()); ++jp) {
      const glmb::Gaussian g =
          jp == 0 ? predicted
                  : kalman_update(predicted, prev_sensor,
                                  prev_zs[static_cast<std::size_t>(jp - 1)])
                        .posterior;
      for (int j = 0; j <= static_cast<int>(zs.size()); ++j) {
        const DetectionFactor f = detection_factor(g, sensor, j, zs);
        CHECK(table.surrogate_pair_factor(i, 1, jp, j) ==
              doctest::Approx(f.weight).epsilon(1e-9));
      }
    }
    for (std::size_t c = 1; c < table.cell_count(); ++c) {
      const std::vector<int> tuple = tuple_of_cell(table.sensor_sizes(), c);
      const double expected = table.row(i).keep_prob *
                              table.surrogate_factor(i, 0, tuple[0]) *
                              table.surrogate_pair_factor(i, 1, tuple[0],
                                                          tuple[1]);
      CHECK(table.surrogate_row_weight(i, tuple) == doctest::Approx(expected));
    }
  }
}

TEST_CASE("the surrogate target covers the exact target's support") {
  const testutil::TinyInstance t = testutil::two_sensor_instance();
  const AssociationWeightTable table = t.table(SamplerMode::markov);
  for (int i = 0; i < table.rows(); ++i)
    for (std::size_t c = 1; c < table.cell_count(); ++c) {
      const std::vector<int> tuple = tuple_of_cell(table.sensor_sizes(), c);
      if (table.row_weight(i, tuple) > 0.0)
        CHECK(table.surrogate_row_weight(i, tuple) > 0.0);
    }
}

TEST_CASE("factorized tables evaluate weights without dense storage") {
  const testutil::TinyInstance t = testutil::two_sensor_instance();
  const AssociationWeightTable fact = t.table(SamplerMode::factorized);
  const AssociationWeightTable dense = t.table(SamplerMode::dense);
  CHECK_THROWS_AS(fact.dense_cells(0), glmb::invalid_state);
  for (int i = 0; i < fact.rows(); ++i)
    for (std::size_t c = 1; c < fact.cell_count(); ++c) {
      const std::vector<int> tuple = tuple_of_cell(fact.sensor_sizes(), c);
      CHECK(fact.row_weight(i, tuple) ==
            doctest::Approx(dense.dense_cells(i)[c]).epsilon(1e-9));
    }
}

TEST_CASE("table construction validates the parent component") {
  const testutil::TinyInstance t = testutil::two_sensor_instance();
  glmb::GlmbComponent bad = t.parent;
  bad.tracks.clear();
  CHECK_THROWS_AS(AssociationWeightTable::build(bad, t.motion, t.birth, 1,
                                                t.suite, t.scan,
                                                SamplerMode::dense),
                  glmb::invalid_argument);
  glmb::MultiScan short_scan;
  short_scan.by_sensor.resize(1);
  CHECK_THROWS_AS(AssociationWeightTable::build(t.parent, t.motion, t.birth, 1,
                                                t.suite, short_scan,
                                                SamplerMode::dense),
                  glmb::invalid_argument);
}
