#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "oracle.hpp"
#include "pgmatch/eval.hpp"

using namespace pgmatch;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

namespace {

Correspondence pred_of(const std::vector<std::pair<int, int>>& pairs) {
  Correspondence c;
  for (const auto& [s, t] : pairs) c.pairs.push_back({s, t, 1.0});
  return c;
}

}  // namespace

TEST_CASE("a perfect prediction scores one across the board", "[eval]") {
  const std::vector<std::pair<int, int>> truth = {{0, 2}, {1, 0}, {2, 1}};
  const MetricReport m = score(pred_of(truth), truth);
  REQUIRE(m.recall == 1.0);
  REQUIRE(m.precision == 1.0);
  REQUIRE(m.f1 == 1.0);
}

TEST_CASE("partially correct predictions score the known ratios", "[eval]") {
  // five truth pairs, four predictions, three of them right
  const std::vector<std::pair<int, int>> truth = {
      {0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};
  const Correspondence pred = pred_of({{0, 0}, {1, 1}, {2, 2}, {3, 9}});
  const MetricReport m = score(pred, truth);
  REQUIRE(m.recall == Catch::Approx(3.0 / 5.0));
  REQUIRE(m.precision == Catch::Approx(3.0 / 4.0));
  REQUIRE(m.f1 == Catch::Approx(2.0 * 0.6 * 0.75 / (0.6 + 0.75)));
}

TEST_CASE("empty predictions score zero; empty truth is an error", "[eval]") {
  const std::vector<std::pair<int, int>> truth = {{0, 0}};
  const MetricReport m = score(Correspondence{}, truth);
  REQUIRE(m.recall == 0.0);
  REQUIRE(m.precision == 0.0);
  REQUIRE(m.f1 == 0.0);
  REQUIRE_THROWS_MATCHES(score(Correspondence{}, {}), invalid_input,
                         MessageMatches(ContainsSubstring("ground truth")));
}

TEST_CASE("f1 lies between recall and precision", "[eval]") {
  auto eng = std::mt19937_64(71);
  std::uniform_int_distribution<int> node(0, 9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<int, int>> truth;
    for (int i = 0; i < 6; ++i) truth.push_back({i, node(eng)});
    Correspondence pred;
    for (int i = 0; i < 4; ++i) pred.pairs.push_back({i, node(eng), 1.0});
    const MetricReport m = score(pred, truth);
    if (m.recall + m.precision == 0.0) {
      REQUIRE(m.f1 == 0.0);
      continue;
    }
    REQUIRE(m.f1 >= std::min(m.recall, m.precision) - 1e-15);
    REQUIRE(m.f1 <= std::max(m.recall, m.precision) + 1e-15);
  }
}

TEST_CASE("sample statistics match hand calculations", "[eval]") {
  const AggregateStat single = sample_stat({0.7});
  REQUIRE(single.mean == 0.7);
  REQUIRE(single.stddev == 0.0);

  const AggregateStat s = sample_stat({2.0, 4.0, 6.0});
  REQUIRE(s.mean == Catch::Approx(4.0));
  REQUIRE(s.stddev == Catch::Approx(2.0));  // sample std with n-1

  // sorting inside makes aggregation independent of the seed ordering
  const AggregateStat a = sample_stat({0.3, 0.1, 0.2});
  const AggregateStat b = sample_stat({0.2, 0.3, 0.1});
  REQUIRE(a.mean == b.mean);
  REQUIRE(a.stddev == b.stddev);

  REQUIRE_THROWS_MATCHES(sample_stat({}), invalid_input,
                         MessageMatches(ContainsSubstring("no values")));
}

TEST_CASE("experiment cells aggregate one row per seed", "[eval]") {
  ExperimentSpec spec;
  spec.synth.n_match = 8;
  spec.synth.feat_dim = 4;
  spec.match.rounds = 2;
  const auto table = run_experiment({spec}, {1, 2});
  REQUIRE(table.size() == 1);
  const ExperimentCell& cell = table[0];
  REQUIRE(cell.dataset == "knn");
  REQUIRE(cell.rows.size() == 2);
  REQUIRE(cell.rows[0].seed == 1);
  REQUIRE(cell.rows[1].seed == 2);
  REQUIRE(cell.rows[0].wall_seconds > 0.0);

  std::vector<double> fs = {cell.rows[0].metrics.f1, cell.rows[1].metrics.f1};
  const AggregateStat expect = sample_stat(fs);
  REQUIRE(cell.f1.mean == expect.mean);
  REQUIRE(cell.f1.stddev == expect.stddev);
}

TEST_CASE("a repeated seed collapses the spread to zero", "[eval]") {
  ExperimentSpec spec;
  spec.synth.n_match = 8;
  spec.synth.feat_dim = 4;
  spec.match.rounds = 2;
  const auto table = run_experiment({spec}, {7, 7});
  REQUIRE(table[0].f1.stddev == 0.0);
  REQUIRE(table[0].recall.stddev == 0.0);
  REQUIRE(table[0].rows[0].metrics.f1 == table[0].rows[1].metrics.f1);
}

TEST_CASE("a grid produces one cell per spec in order", "[eval]") {
  ExperimentSpec knn_spec;
  knn_spec.synth.n_match = 8;
  knn_spec.synth.feat_dim = 4;
  knn_spec.match.rounds = 2;

  ExperimentSpec ba_spec = knn_spec;
  ba_spec.synth.kind = SynthKind::ba;
  ba_spec.synth.m_ba = 2;

  ExperimentSpec partial = knn_spec;
  partial.synth.rho = 0.8;
  partial.match.b = 0.8;

  const auto table = run_experiment({knn_spec, ba_spec, partial}, {5});
  REQUIRE(table.size() == 3);
  REQUIRE(table[0].dataset == "knn");
  REQUIRE(table[1].dataset == "ba");
  REQUIRE(table[2].dataset == "knn");
  REQUIRE(table[2].rho == 0.8);
  REQUIRE(table[2].b == 0.8);
  for (const auto& cell : table) {
    REQUIRE(cell.rows.size() == 1);
    REQUIRE(cell.f1.mean == cell.rows[0].metrics.f1);
    REQUIRE(cell.f1.stddev == 0.0);
  }
}
