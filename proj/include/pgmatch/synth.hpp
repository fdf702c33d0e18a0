#ifndef PGMATCH_SYNTH_HPP
#define PGMATCH_SYNTH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pgmatch/common.hpp"
#include "pgmatch/graph.hpp"

namespace pgmatch {

enum class SynthKind { knn, ba };

struct SynthConfig {
  SynthKind kind = SynthKind::knn;
  int k = 3;               // K-NN neighbor count
  int m_ba = 3;            // BA attachment count
  int n_match = 50;        // ground-truth matched node count
  double rho = 1.0;        // overlap ratio
  int feat_dim = 8;        // feature dimension D
  double noise_scale = 0.1;  // target-side feature perturbation
  std::uint64_t seed = 0;

  int total_nodes() const {
    return static_cast<int>(std::lround(static_cast<double>(n_match) / rho));
  }
  void validate() const {
    require(rho > 0.0 && rho <= 1.0, "synth config: rho must be in (0,1]");
    require(n_match >= 2, "synth config: n_match must be >= 2");
    require(k >= 1 && m_ba >= 1, "synth config: k and m_ba must be >= 1");
    require(noise_scale >= 0.0, "synth config: noise_scale must be >= 0");
    require(feat_dim >= 1, "synth config: feat_dim must be >= 1");
    const int n = total_nodes();
    if (kind == SynthKind::knn)
      require(n > k, "synth config: need more than k nodes for a K-NN graph");
    else
      require(n_match >= m_ba + 1,
              "synth config: BA core needs at least m_ba+1 nodes");
  }
};

struct GraphPair {
  Graph source;
  Graph target;
  std::vector<std::pair<int, int>> ground_truth;
};

namespace detail {

// Directed K-NN adjacency (Euclidean on feature rows), then symmetrized.
inline Mat knn_adjacency(const Mat& X, int k) {
  const int n = static_cast<int>(X.rows());
  Mat A = Mat::Zero(n, n);
  std::vector<int> idx;
  for (int i = 0; i < n; ++i) {
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), 0);
    idx.erase(idx.begin() + i);  // never a self-neighbor
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                      [&](int a, int b) {
                        return (X.row(a) - X.row(i)).squaredNorm() <
                               (X.row(b) - X.row(i)).squaredNorm();
                      });
    for (int j = 0; j < k; ++j) A(i, idx[j]) = 1.0;
  }
  return A.cwiseMax(A.transpose());
}

// Extend a BA graph in place up to n nodes: each newcomer attaches to m
// distinct existing nodes with probability proportional to their degree
// before its arrival. With an empty input the growth starts from an
// (m+1)-clique.
inline void ba_grow(Mat& A, int n, int m, std::mt19937_64& eng) {
  int n0 = static_cast<int>(A.rows());
  if (n0 == 0) {
    n0 = std::min(m + 1, n);
    A = Mat::Ones(n0, n0) - Mat::Identity(n0, n0);
  }
  if (n <= n0) return;
  Vec deg = A.rowwise().sum();
  deg.conservativeResize(n);
  deg.tail(n - n0).setZero();
  A.conservativeResize(n, n);
  A.bottomRows(n - n0).setZero();
  A.rightCols(n - n0).setZero();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = n0; t < n; ++t) {
    Vec w = deg.head(t);
    for (int pick = 0; pick < std::min(m, t); ++pick) {
      const double total = w.sum();
      int j = t - 1;
      if (total > 0.0) {
        double r = unif(eng) * total, acc = 0.0;
        for (int u = 0; u < t; ++u) {
          acc += w(u);
          if (r <= acc) {
            j = u;
            break;
          }
        }
      }
      w(j) = 0.0;  // without replacement
      A(t, j) = A(j, t) = 1.0;
      deg(j) += 1.0;
      deg(t) += 1.0;
    }
  }
}

inline Mat gaussian_features(int n, int d, std::mt19937_64& eng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat X(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) X(i, j) = gauss(eng);
  return X;
}

inline std::vector<int> random_permutation(int n, std::mt19937_64& eng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(perm[i], perm[pick(eng)]);
  }
  return perm;
}

// Relabel nodes so that new id perm[i] carries old node i.
inline Graph permute_graph(const Graph& g, const std::vector<int>& perm) {
  const int n = g.node_count();
  std::vector<int> inv(n);
  for (int i = 0; i < n; ++i) inv[perm[i]] = i;
  Graph out;
  out.weights = Mat::Zero(n, n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) out.weights(u, v) = g.weights(inv[u], inv[v]);
  if (g.has_features()) {
    out.features = Mat(n, g.features.cols());
    for (int u = 0; u < n; ++u) out.features.row(u) = g.features.row(inv[u]);
  }
  if (g.has_types()) {
    out.node_types.resize(n);
    for (int u = 0; u < n; ++u) out.node_types[u] = g.node_types[inv[u]];
    out.type_names = g.type_names;
  }
  return out;
}

// Shared generator body. `extra` = non-overlap node count per side (layout:
// core ids 0..n_match-1, extras after). `offsets` (possibly empty) is a
// deterministic per-node feature shift added after all random draws, and
// `types` (possibly empty) annotates nodes; both leave the engine stream
// identical to the untyped path's.
inline GraphPair gen_pair_impl(const SynthConfig& cfg, int extra,
                               const Mat& offsets,
                               const std::vector<int>& types,
                               const std::vector<std::string>& type_names) {
  const int nc = cfg.n_match;
  const int n = nc + extra;
  auto eng = make_engine(cfg.seed, 0x7379);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const Mat core = gaussian_features(nc, cfg.feat_dim, eng);
  Mat Xs(n, cfg.feat_dim), Xt(n, cfg.feat_dim);
  Xs.topRows(nc) = core;
  Xt.topRows(nc) = core;
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < cfg.feat_dim; ++j)
      Xt(i, j) += cfg.noise_scale * gauss(eng);
  if (extra > 0) {
    Xs.bottomRows(extra) = gaussian_features(extra, cfg.feat_dim, eng);
    Xt.bottomRows(extra) = gaussian_features(extra, cfg.feat_dim, eng);
  }
  if (offsets.size() > 0) {
    Xs += offsets;
    Xt += offsets;
  }

  Mat As, At;
  if (cfg.kind == SynthKind::knn) {
    As = knn_adjacency(Xs, cfg.k);
    At = knn_adjacency(Xt, cfg.k);
  } else {
    Mat core_adj;
    ba_grow(core_adj, nc, cfg.m_ba, eng);
    As = core_adj;
    ba_grow(As, n, cfg.m_ba, eng);
    At = core_adj;
    ba_grow(At, n, cfg.m_ba, eng);
  }

  GraphPair pair;
  pair.source.features = Xs;
  pair.source.weights = feature_cosine_weights(Xs, As);
  Graph tgt;
  tgt.features = Xt;
  tgt.weights = feature_cosine_weights(Xt, At);
  if (!types.empty()) {
    pair.source.node_types = types;
    pair.source.type_names = type_names;
    tgt.node_types = types;
    tgt.type_names = type_names;
  }

  const auto perm = random_permutation(n, eng);
  pair.target = permute_graph(tgt, perm);
  for (int i = 0; i < nc; ++i) pair.ground_truth.push_back({i, perm[i]});
  return pair;
}

}  // namespace detail

// Paired synthetic graphs with a shared core of n_match nodes (ids 0..n-1
// on the source side) and independently grown non-overlap remainders, so
// that n_match / |V| = rho up to rounding. Target core features get a
// noise_scale-sized Gaussian perturbation and target node ids are randomly
// permuted; ground_truth lists the surviving (source_id, target_id) pairs.
inline GraphPair gen_pair(const SynthConfig& cfg) {
  cfg.validate();
  return detail::gen_pair_impl(cfg, cfg.total_nodes() - cfg.n_match, Mat(),
                               {}, {});
}

struct TypedSynthConfig {
  SynthConfig base;
  std::vector<std::string> type_names;     // one entry per type
  std::vector<double> type_proportions;    // share of n_match per type
  std::vector<double> type_rho;            // per-type overlap ratio
  double type_sep = 3.0;  // feature-centroid spacing between types

  void validate() const {
    base.validate();
    require(!type_names.empty(), "typed synth config: need at least one type");
    require(type_proportions.size() == type_names.size() &&
                type_rho.size() == type_names.size(),
            "typed synth config: per-type vectors must match type count");
    for (double p : type_proportions)
      require(p > 0.0, "typed synth config: proportions must be positive");
    for (double r : type_rho)
      require(r > 0.0 && r <= 1.0, "typed synth config: rho must be in (0,1]");
  }
};

// Typed analogue of gen_pair. n_match is split across types by proportion
// (largest remainder) and each type keeps its own overlap ratio. Type c's
// features are centered at c·type_sep on coordinate c mod D, so the edge
// rule links mostly within types; with a single type the offset vanishes
// and the output equals gen_pair's up to the type annotations.
inline GraphPair gen_typed_pair(const TypedSynthConfig& tcfg) {
  tcfg.validate();
  const SynthConfig& cfg = tcfg.base;
  const int n_types = static_cast<int>(tcfg.type_names.size());

  const double psum = std::accumulate(tcfg.type_proportions.begin(),
                                      tcfg.type_proportions.end(), 0.0);
  std::vector<int> match_c(n_types);
  {
    std::vector<std::pair<double, int>> rem(n_types);
    int assigned = 0;
    for (int c = 0; c < n_types; ++c) {
      const double exact = cfg.n_match * tcfg.type_proportions[c] / psum;
      match_c[c] = static_cast<int>(exact);
      rem[c] = {exact - match_c[c], c};
      assigned += match_c[c];
    }
    std::sort(rem.rbegin(), rem.rend());
    for (int i = 0; i < cfg.n_match - assigned; ++i)
      ++match_c[rem[static_cast<std::size_t>(i) % n_types].second];
    for (int c = 0; c < n_types; ++c)
      require(match_c[c] >= 1, "typed synth config: a type got no core nodes");
  }

  // layout mirrors gen_pair_impl: cores first (type blocks), then extras
  std::vector<int> types;
  for (int c = 0; c < n_types; ++c) types.insert(types.end(), match_c[c], c);
  for (int c = 0; c < n_types; ++c) {
    const int total =
        static_cast<int>(std::lround(match_c[c] / tcfg.type_rho[c]));
    types.insert(types.end(), total - match_c[c], c);
  }
  const int n = static_cast<int>(types.size());
  if (cfg.kind == SynthKind::knn)
    require(n > cfg.k, "typed synth config: need more than k nodes");

  Mat offsets = Mat::Zero(n, cfg.feat_dim);
  for (int i = 0; i < n; ++i)
    offsets(i, types[i] % cfg.feat_dim) = tcfg.type_sep * types[i];

  return detail::gen_pair_impl(cfg, n - cfg.n_match, offsets, types,
                               tcfg.type_names);
}

}  // namespace pgmatch

#endif  // PGMATCH_SYNTH_HPP
