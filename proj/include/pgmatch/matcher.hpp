#ifndef PGMATCH_MATCHER_HPP
#define PGMATCH_MATCHER_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "pgmatch/common.hpp"
#include "pgmatch/embed.hpp"
#include "pgmatch/graph.hpp"
#include "pgmatch/hetero.hpp"
#include "pgmatch/pot.hpp"

namespace pgmatch {

enum class MatchMode { homogeneous, heterogeneous };

struct MatchConfig {
  int rounds = 10;       // alternation rounds M
  double b = 1.0;        // transport mass budget
  double alpha1 = 1e-2;  // regularizer weight
  MatchMode mode = MatchMode::homogeneous;
  bool wasserstein_only = false;  // drop the pairwise term (fixture mode)
  bool collect_trace = false;     // record per-iteration solver rows
  SolverConfig solver;
  EmbedOptConfig embed;
  HeteroParams hetero;  // consulted only in heterogeneous mode
  std::uint64_t seed = 0;

  void validate() const {
    require(rounds >= 1, "match config: rounds must be >= 1");
    require(b > 0.0 && b <= 1.0, "match config: b must be in (0,1]");
    solver.validate();
  }
};

struct Correspondence {
  // (source_id, target_id, score) triples; sources absent here went to the
  // dummy node instead, with unmatched_scores holding their dummy mass
  struct Pair {
    int source = 0;
    int target = 0;
    double score = 0.0;
  };
  std::vector<Pair> pairs;
  std::vector<int> unmatched;
  std::vector<double> unmatched_scores;
};

struct MatchTraceRound {
  int round = 0;
  double alpha = 0.0;
  double ot_objective = 0.0;     // subproblem objective after the OT solve
  double embed_objective = 0.0;  // embedding objective after the update
};

struct MatchResult {
  Correspondence correspondence;
  Mat plan;
  Mat Zs, Zt;
  std::vector<MatchTraceRound> trace;
  std::vector<SolveTraceRow> solver_trace;  // filled when collect_trace is on
};

// Blend schedule: round m of M runs the OT solve at alpha = m/M.
inline double alpha_schedule(int m, int M) {
  require(M >= 1 && m >= 0 && m < M, "alpha schedule: need 0 <= m < M");
  return static_cast<double>(m) / static_cast<double>(M);
}

// Append the dummy column: row i gets 1 - sum_j T_ij. Expects a plan whose
// rows were already normalized to per-node fractions (sums <= 1).
inline Mat extend_plan(const Mat& T_hat) {
  const int ns = static_cast<int>(T_hat.rows());
  const int nt = static_cast<int>(T_hat.cols());
  Mat ext(ns, nt + 1);
  ext.leftCols(nt) = T_hat;
  for (int i = 0; i < ns; ++i) {
    const double rs = T_hat.row(i).sum();
    if (rs > 1.0 + 1e-9)
      throw invalid_input("extend_plan: row sum exceeds 1");
    ext(i, nt) = 1.0 - rs;
  }
  return ext;
}

// Per-row argmax over the extended plan. Ties between a real column and the
// dummy go to the real column; ties among real columns go to the lowest
// index, so extraction is deterministic.
inline Correspondence extract_correspondences(const Mat& T_ext) {
  Correspondence out;
  const int nt = static_cast<int>(T_ext.cols()) - 1;
  for (int i = 0; i < T_ext.rows(); ++i) {
    int best = nt;  // dummy
    double best_val = T_ext(i, nt);
    for (int j = nt - 1; j >= 0; --j)
      if (T_ext(i, j) >= best_val) {
        best = j;
        best_val = T_ext(i, j);
      }
    if (best == nt) {
      out.unmatched.push_back(i);
      out.unmatched_scores.push_back(best_val);
    } else {
      out.pairs.push_back({i, best, best_val});
    }
  }
  return out;
}

namespace detail {

// Rows of the raw plan are bounded by mu_s; divide them out so each row
// reads as "fraction of this node's mass that found a counterpart". The
// dummy column then measures the unmatched fraction on the same scale.
inline Mat mass_normalized(const Mat& T, const Vec& mu_s,
                           double floor_val = kMassFloor) {
  Mat U = T;
  for (int i = 0; i < U.rows(); ++i) {
    const double m = mu_s(i);
    if (m > floor_val)
      U.row(i) /= m;
    else
      U.row(i).setZero();
  }
  // clamp rounding overshoot so extend_plan's row-sum check stays happy
  for (int i = 0; i < U.rows(); ++i) {
    const double rs = U.row(i).sum();
    if (rs > 1.0) U.row(i) /= rs;
  }
  return U;
}

}  // namespace detail

// The full alternation: for m = 0..M-1 solve the partial-OT subproblem at
// alpha = m/M (warm-started from the previous round's plan), then refit the
// embeddings against the new plan. The embedding subproblem is solved at
// the *next* round's alpha — the weight at which the upcoming OT solve will
// actually consume the kernel — otherwise round 0 trains with a zero
// cross-graph term and the two embedding spaces never align.
inline MatchResult ppgm_run(const Graph& gs, const Graph& gt,
                            const MatchConfig& cfg) {
  cfg.validate();
  gs.validate();
  gt.validate();
  if (cfg.mode == MatchMode::heterogeneous)
    require(gs.has_types() && gt.has_types(),
            "heterogeneous mode requires node types on both graphs");

  PartialCouplingSpec spec{build_measure(gs), build_measure(gt), cfg.b};
  const Mat Gs = structural_dissimilarity(gs);
  const Mat Gt = structural_dissimilarity(gt);

  MatchResult res;
  res.Zs = init_embedding(gs.node_count(), gs.features, cfg.embed, cfg.seed, 1);
  res.Zt = init_embedding(gt.node_count(), gt.features, cfg.embed, cfg.seed, 2);
  res.plan = product_plan(spec);

  NeighborSets ns_s, ns_t;
  HeteroState hstate;
  HeteroParams hpar = cfg.hetero;
  hpar.alpha1 = cfg.alpha1;
  hpar.kernel = cfg.embed.kernel;
  hpar.seed = split_seed(cfg.seed, 3);
  if (cfg.mode == MatchMode::heterogeneous) {
    RWRConfig rwr;
    rwr.seed = split_seed(cfg.seed, 4);
    ns_s = rwr_sample(gs, rwr);
    rwr.seed = split_seed(cfg.seed, 5);
    ns_t = rwr_sample(gt, rwr);
    hstate.Zs = res.Zs;
    hstate.Zt = res.Zt;
    hstate.beta_s = Vec::Zero(gs.node_count());
    hstate.beta_t = Vec::Zero(gt.node_count());
  }

  for (int m = 0; m < cfg.rounds; ++m) {
    const double alpha = alpha_schedule(m, cfg.rounds);
    const Mat Cs = fused_cost(Gs, res.Zs, alpha, cfg.embed.kernel);
    const Mat Ct = fused_cost(Gt, res.Zt, alpha, cfg.embed.kernel);
    const Mat K_cross = embedding_kernel(res.Zs, res.Zt, cfg.embed.kernel);
    std::vector<SolveTraceRow> round_trace;
    res.plan = proximal_solve(Cs, Ct, K_cross, alpha, spec, cfg.solver,
                              res.plan, !cfg.wasserstein_only,
                              cfg.collect_trace ? &round_trace : nullptr);
    for (auto& tr : round_trace) {
      tr.outer += m * cfg.solver.outer_iters;  // global iteration counter
      res.solver_trace.push_back(tr);
    }
    MatchTraceRound row;
    row.round = m;
    row.alpha = alpha;
    row.ot_objective = objective_eval(Cs, Ct, K_cross, res.plan, alpha, spec,
                                      square_loss(), !cfg.wasserstein_only);

    if (!cfg.wasserstein_only) {
      const double alpha_next =
          static_cast<double>(m + 1) / static_cast<double>(cfg.rounds);
      if (cfg.mode == MatchMode::heterogeneous) {
        hpar.alpha = alpha_next;
        hstate = optimize_hetero_embeddings(
            hstate, Gs, Gt, res.plan, ns_s, ns_t, gs.node_types, gt.node_types,
            spec, hpar, cfg.embed);
        res.Zs = hstate.Zs;
        res.Zt = hstate.Zt;
        row.embed_objective =
            hetero_embedding_objective_grad(hstate, Gs, Gt, res.plan, ns_s,
                                            ns_t, gs.node_types, gt.node_types,
                                            spec, hpar)
                .objective;
      } else {
        auto z = optimize_embeddings(res.Zs, res.Zt, Gs, Gt, res.plan,
                                     alpha_next, cfg.alpha1, spec, cfg.embed);
        res.Zs = std::move(z.first);
        res.Zt = std::move(z.second);
        row.embed_objective =
            embedding_objective(res.Zs, res.Zt, Gs, Gt, res.plan, alpha_next,
                                cfg.alpha1, spec, {}, cfg.embed.kernel);
      }
    }
    res.trace.push_back(row);
  }

  const Mat ext = extend_plan(detail::mass_normalized(res.plan, spec.mu_s,
                                                      cfg.solver.floor_val));
  res.correspondence = extract_correspondences(ext);
  return res;
}

// Pure partial-Wasserstein solve over an explicit cost matrix; the 2x2
// two-node demonstration and the sweep command run through this.
inline MatchResult wasserstein_only_run(const Mat& K, const Vec& mu_s,
                                        const Vec& mu_t, double b,
                                        const SolverConfig& solver = {},
                                        bool collect_trace = false) {
  PartialCouplingSpec spec{mu_s, mu_t, b};
  spec.validate();
  const Mat zero_s = Mat::Zero(mu_s.size(), mu_s.size());
  const Mat zero_t = Mat::Zero(mu_t.size(), mu_t.size());
  MatchResult res;
  res.plan = proximal_solve(zero_s, zero_t, K, 1.0, spec, solver,
                            product_plan(spec), /*with_gw=*/false,
                            collect_trace ? &res.solver_trace : nullptr);
  const Mat ext = extend_plan(detail::mass_normalized(res.plan, mu_s,
                                                      solver.floor_val));
  res.correspondence = extract_correspondences(ext);
  return res;
}

}  // namespace pgmatch

#endif  // PGMATCH_MATCHER_HPP
