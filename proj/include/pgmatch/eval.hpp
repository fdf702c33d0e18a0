#ifndef PGMATCH_EVAL_HPP
#define PGMATCH_EVAL_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pgmatch/common.hpp"
#include "pgmatch/matcher.hpp"
#include "pgmatch/synth.hpp"

namespace pgmatch {

struct MetricReport {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

// recall = correct/|truth|, precision = correct/|pred| (0 on no
// predictions), f1 = harmonic mean (0 when both rates vanish).
inline MetricReport score(const Correspondence& pred,
                          const std::vector<std::pair<int, int>>& truth) {
  require(!truth.empty(), "score: ground truth is empty");
  const std::set<std::pair<int, int>> truth_set(truth.begin(), truth.end());
  int correct = 0;
  for (const auto& p : pred.pairs)
    if (truth_set.count({p.source, p.target})) ++correct;
  MetricReport m;
  m.recall = static_cast<double>(correct) / static_cast<double>(truth.size());
  m.precision = pred.pairs.empty()
                    ? 0.0
                    : static_cast<double>(correct) /
                          static_cast<double>(pred.pairs.size());
  if (m.recall + m.precision > 0.0)
    m.f1 = 2.0 * m.recall * m.precision / (m.recall + m.precision);
  return m;
}

struct AggregateStat {
  double mean = 0.0;
  double stddev = 0.0;  // sample std (n-1); 0 for a single value
};

// Values are sorted before summing so aggregation is exactly
// order-independent across seed orderings.
inline AggregateStat sample_stat(std::vector<double> values) {
  require(!values.empty(), "sample_stat: no values");
  std::sort(values.begin(), values.end());
  AggregateStat s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double acc = 0.0;
    for (double v : values) acc += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(acc / static_cast<double>(values.size() - 1));
  }
  return s;
}

struct ExperimentRow {
  std::string dataset;
  double rho = 0.0;
  double b = 0.0;
  std::uint64_t seed = 0;
  MetricReport metrics;
  double wall_seconds = 0.0;
};

struct ExperimentCell {
  std::string dataset;
  double rho = 0.0;
  double b = 0.0;
  std::vector<ExperimentRow> rows;  // one per seed
  AggregateStat recall, precision, f1;
};

struct ExperimentSpec {
  SynthConfig synth;
  MatchConfig match;
};

inline std::string dataset_name(SynthKind kind) {
  return kind == SynthKind::knn ? "knn" : "ba";
}

// One generated pair + full matching run per (spec, seed); per-cell
// mean +- sample std over seeds.
inline std::vector<ExperimentCell> run_experiment(
    const std::vector<ExperimentSpec>& grid,
    const std::vector<std::uint64_t>& seeds) {
  require(!seeds.empty(), "run_experiment: need at least one seed");
  std::vector<ExperimentCell> table;
  for (const auto& spec : grid) {
    ExperimentCell cell;
    cell.dataset = dataset_name(spec.synth.kind);
    cell.rho = spec.synth.rho;
    cell.b = spec.match.b;
    std::vector<double> rs, ps, fs;
    for (auto seed : seeds) {
      SynthConfig scfg = spec.synth;
      scfg.seed = seed;
      MatchConfig mcfg = spec.match;
      mcfg.seed = seed;
      const auto t0 = std::chrono::steady_clock::now();
      const GraphPair pair = gen_pair(scfg);
      const MatchResult res = ppgm_run(pair.source, pair.target, mcfg);
      const MetricReport m = score(res.correspondence, pair.ground_truth);
      const std::chrono::duration<double> dt =
          std::chrono::steady_clock::now() - t0;
      cell.rows.push_back(
          {cell.dataset, cell.rho, cell.b, seed, m, dt.count()});
      rs.push_back(m.recall);
      ps.push_back(m.precision);
      fs.push_back(m.f1);
    }
    cell.recall = sample_stat(rs);
    cell.precision = sample_stat(ps);
    cell.f1 = sample_stat(fs);
    table.push_back(std::move(cell));
  }
  return table;
}

}  // namespace pgmatch

#endif  // PGMATCH_EVAL_HPP
