#ifndef PGMATCH_HETERO_HPP
#define PGMATCH_HETERO_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "pgmatch/common.hpp"
#include "pgmatch/embed.hpp"
#include "pgmatch/graph.hpp"

namespace pgmatch {

struct RWRConfig {
  double p = 0.5;  // restart probability
  int eta = 10;    // walk length
  int iota = 10;   // walks per start node
  int n = 5;       // neighbors kept per type
  std::uint64_t seed = 0;

  void validate() const {
    require(p >= 0.0 && p <= 1.0, "rwr: restart probability outside [0,1]");
    require(eta >= 1 && iota >= 1 && n >= 1, "rwr: eta, iota, n must be >= 1");
  }
};

// Per-node typed neighbor sets from random-walk-with-restart sampling.
struct NeighborSets {
  // by_type[u] maps type -> kept neighbor ids (each of that type, never u)
  std::vector<std::map<int, std::vector<int>>> by_type;
  std::vector<std::vector<int>> all;  // flattened union per node

  int node_count() const { return static_cast<int>(all.size()); }
};

// RWR(p, eta, iota, n): from each start node run iota walks of length eta;
// each step restarts with probability p, otherwise moves to a uniformly
// random adjacent vertex. Visit counts exclude the start node itself; the
// n most-visited vertices per type are kept, ties resolved to lower ids.
// Each start node draws from its own RNG stream, so sampling is
// reproducible regardless of traversal order.
inline NeighborSets rwr_sample(const Graph& g, const RWRConfig& cfg) {
  cfg.validate();
  const int n_nodes = g.node_count();
  std::vector<std::vector<int>> adj(n_nodes);
  for (int i = 0; i < n_nodes; ++i)
    for (int j = 0; j < n_nodes; ++j)
      if (g.weights(i, j) > 0.0) adj[i].push_back(j);

  NeighborSets out;
  out.by_type.resize(n_nodes);
  out.all.resize(n_nodes);
  for (int u = 0; u < n_nodes; ++u) {
    if (adj[u].empty()) continue;
    auto eng = make_engine(cfg.seed, static_cast<std::uint64_t>(u));
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<int> visits(n_nodes, 0);
    for (int w = 0; w < cfg.iota; ++w) {
      int cur = u;
      for (int s = 0; s < cfg.eta; ++s) {
        if (coin(eng) < cfg.p) {
          cur = u;
        } else if (!adj[cur].empty()) {
          std::uniform_int_distribution<int> pick(
              0, static_cast<int>(adj[cur].size()) - 1);
          cur = adj[cur][pick(eng)];
        }
        if (cur != u) ++visits[cur];
      }
    }
    // bucket by type (single implicit type when the graph is homogeneous)
    std::map<int, std::vector<int>> candidates;
    for (int v = 0; v < n_nodes; ++v)
      if (visits[v] > 0)
        candidates[g.has_types() ? g.node_types[v] : 0].push_back(v);
    for (auto& [type, ids] : candidates) {
      std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        return visits[a] != visits[b] ? visits[a] > visits[b] : a < b;
      });
      if (static_cast<int>(ids.size()) > cfg.n) ids.resize(cfg.n);
      out.by_type[u][type] = ids;
      out.all[u].insert(out.all[u].end(), ids.begin(), ids.end());
    }
    std::sort(out.all[u].begin(), out.all[u].end());
  }
  return out;
}

namespace detail {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(sigmoid(x)) without overflow for large |x|
inline double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

}  // namespace detail

// Negative-sampling log-likelihood of the neighbor structure under the
// embedding table:
//   sum_u [ sum_{p in N_{r(u),u}} log sig(z_u' z_p)
//         + sum_{drawn n} log sig(-z_u' z_n) ].
// Positives are the same-type neighbors of u; negatives are drawn uniformly
// from V \ (N_u u {u}), neg_per_node per node, from a seeded stream.
// Always <= 0. The gradient accumulates into `grad` when provided.
inline double neg_sampling_loglik(const Mat& Z, const NeighborSets& ns,
                                  const std::vector<int>& node_types,
                                  int neg_per_node, std::uint64_t seed,
                                  Mat* grad = nullptr) {
  const int n_nodes = static_cast<int>(Z.rows());
  double ll = 0.0;
  for (int u = 0; u < n_nodes; ++u) {
    const int type_u =
        node_types.empty() ? 0 : node_types[static_cast<size_t>(u)];
    auto it = ns.by_type[u].find(type_u);
    if (it != ns.by_type[u].end()) {
      for (int p : it->second) {
        const double x = Z.row(u).dot(Z.row(p));
        ll += detail::log_sigmoid(x);
        if (grad) {
          const double c = 1.0 - detail::sigmoid(x);
          grad->row(u) += c * Z.row(p);
          grad->row(p) += c * Z.row(u);
        }
      }
    }
    // candidate pool: everything outside N_u and u itself
    std::vector<char> excluded(n_nodes, 0);
    excluded[u] = 1;
    for (int v : ns.all[u]) excluded[v] = 1;
    std::vector<int> pool;
    pool.reserve(n_nodes);
    for (int v = 0; v < n_nodes; ++v)
      if (!excluded[v]) pool.push_back(v);
    if (pool.empty()) continue;
    auto eng = make_engine(seed, 0x6e65ULL, static_cast<std::uint64_t>(u));
    std::uniform_int_distribution<int> pick(0, static_cast<int>(pool.size()) - 1);
    for (int k = 0; k < neg_per_node; ++k) {
      const int v = pool[pick(eng)];
      const double x = Z.row(u).dot(Z.row(v));
      ll += detail::log_sigmoid(-x);
      if (grad) {
        const double c = detail::sigmoid(x);
        grad->row(u) -= c * Z.row(v);
        grad->row(v) -= c * Z.row(u);
      }
    }
  }
  return ll;
}

// Kernel ridge-style classifier h(z) = sum_i beta_i k_gauss(z_i, z) used by
// the type-separability penalty. The Gaussian kernel (not the indefinite
// matching kernel) keeps h inside a genuine RKHS.
struct KernelClassifier {
  Vec beta;
  double zeta = 1e-4;
};

namespace detail {

inline Mat gauss_kernel(const Mat& Z) {
  const int n = static_cast<int>(Z.rows());
  Vec sq = Z.rowwise().squaredNorm();
  Mat D = sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
          2.0 * (Z * Z.transpose());
  return (-0.5 * D.array().max(0.0)).exp();
}

}  // namespace detail

// Penalty sum_u (r_u - h(z_u))^2 with integer type codes r_u. Gradients with
// respect to beta and Z accumulate into the provided buffers when non-null.
inline double type_separability_penalty(const Mat& Z,
                                        const std::vector<int>& types,
                                        const KernelClassifier& clf,
                                        Vec* grad_beta = nullptr,
                                        Mat* grad_z = nullptr) {
  const int n = static_cast<int>(Z.rows());
  require(static_cast<int>(types.size()) == n,
          "separability penalty: type label count mismatch");
  require(clf.beta.size() == n, "separability penalty: beta length mismatch");
  const Mat G = detail::gauss_kernel(Z);
  Vec h = G.transpose() * clf.beta;  // h(z_u) = sum_i beta_i g(z_i, z_u)
  double pen = 0.0;
  Vec err(n);
  for (int u = 0; u < n; ++u) {
    err(u) = static_cast<double>(types[u]) - h(u);
    pen += err(u) * err(u);
  }
  if (grad_beta) *grad_beta += G * (-2.0 * err);
  if (grad_z) {
    // d g(z_i, z_u) / d z_i = -(z_i - z_u) g;  symmetric in the other slot
    for (int u = 0; u < n; ++u) {
      const double eu = -2.0 * err(u);
      for (int i = 0; i < n; ++i) {
        const double w = eu * clf.beta(i) * G(i, u);
        if (w == 0.0 || i == u) continue;
        const Vec diff = (Z.row(i) - Z.row(u)).transpose();
        grad_z->row(i) -= (w * diff).transpose();
        grad_z->row(u) += (w * diff).transpose();
      }
    }
  }
  return pen;
}

struct HeteroParams {
  double alpha = 0.0;
  double alpha1 = 1e-2;
  double zeta = 1e-4;
  int neg_per_node = 5;
  std::uint64_t seed = 0;
  KernelConfig kernel;
};

struct HeteroState {
  Mat Zs, Zt;
  Vec beta_s, beta_t;
};

struct HeteroGradients {
  double objective = 0.0;
  Mat grad_zs, grad_zt;
  Vec grad_beta_s, grad_beta_t;
};

// Heterogeneous embedding subproblem: the homogeneous objective with the
// self-fit regularizer replaced by, per graph, the negated neighbor
// log-likelihood plus the type-separability penalty:
//   <L(Cs,Ct,T), T> + alpha <K(Zs,Zt), T>
//     + alpha1 * sum_z [ -loglik_z + zeta * penalty_z ].
inline HeteroGradients hetero_embedding_objective_grad(
    const HeteroState& st, const Mat& Gs, const Mat& Gt, const Mat& T,
    const NeighborSets& ns_s, const NeighborSets& ns_t,
    const std::vector<int>& types_s, const std::vector<int>& types_t,
    const PartialCouplingSpec& spec, const HeteroParams& par) {
  HeteroGradients out;
  // structural + cross terms and their Z gradients come from the shared
  // homogeneous machinery with the self-fit weight zeroed out
  auto base = embedding_objective_grad(st.Zs, st.Zt, Gs, Gt, T, par.alpha,
                                       /*alpha1=*/0.0, spec, {}, par.kernel);
  out.objective = base.objective;
  out.grad_zs = base.grad_s;
  out.grad_zt = base.grad_t;
  out.grad_beta_s = Vec::Zero(st.beta_s.size());
  out.grad_beta_t = Vec::Zero(st.beta_t.size());

  Mat gll_s = Mat::Zero(st.Zs.rows(), st.Zs.cols());
  Mat gll_t = Mat::Zero(st.Zt.rows(), st.Zt.cols());
  const double ll_s = neg_sampling_loglik(st.Zs, ns_s, types_s,
                                          par.neg_per_node, par.seed, &gll_s);
  const double ll_t = neg_sampling_loglik(st.Zt, ns_t, types_t,
                                          par.neg_per_node,
                                          split_seed(par.seed, 0x74ULL), &gll_t);
  out.objective += par.alpha1 * (-ll_s - ll_t);
  out.grad_zs -= par.alpha1 * gll_s;
  out.grad_zt -= par.alpha1 * gll_t;

  if (par.zeta > 0.0) {
    Vec gb_s = Vec::Zero(st.beta_s.size());
    Vec gb_t = Vec::Zero(st.beta_t.size());
    Mat gz_s = Mat::Zero(st.Zs.rows(), st.Zs.cols());
    Mat gz_t = Mat::Zero(st.Zt.rows(), st.Zt.cols());
    KernelClassifier cs{st.beta_s, par.zeta}, ct{st.beta_t, par.zeta};
    const double pen_s =
        type_separability_penalty(st.Zs, types_s, cs, &gb_s, &gz_s);
    const double pen_t =
        type_separability_penalty(st.Zt, types_t, ct, &gb_t, &gz_t);
    out.objective += par.alpha1 * par.zeta * (pen_s + pen_t);
    out.grad_zs += par.alpha1 * par.zeta * gz_s;
    out.grad_zt += par.alpha1 * par.zeta * gz_t;
    out.grad_beta_s += par.alpha1 * par.zeta * gb_s;
    out.grad_beta_t += par.alpha1 * par.zeta * gb_t;
  }
  return out;
}

// Adam over (Zs, Zt, beta_s, beta_t) jointly, mirroring optimize_embeddings.
inline HeteroState optimize_hetero_embeddings(
    const HeteroState& st0, const Mat& Gs, const Mat& Gt, const Mat& T,
    const NeighborSets& ns_s, const NeighborSets& ns_t,
    const std::vector<int>& types_s, const std::vector<int>& types_t,
    const PartialCouplingSpec& spec, const HeteroParams& par,
    const EmbedOptConfig& opt) {
  auto objective_of = [&](const HeteroState& st) {
    return hetero_embedding_objective_grad(st, Gs, Gt, T, ns_s, ns_t, types_s,
                                           types_t, spec, par).objective;
  };
  const double f0 = objective_of(st0);
  for (double lr : {opt.lr, opt.lr / 2.0}) {
    HeteroState st = st0;
    detail::AdamState azs(st.Zs), azt(st.Zt);
    detail::AdamState abs_(Mat(st.beta_s)), abt(Mat(st.beta_t));
    Mat bs = st.beta_s, bt = st.beta_t;
    for (int t = 1; t <= opt.epochs; ++t) {
      auto g = hetero_embedding_objective_grad(st, Gs, Gt, T, ns_s, ns_t,
                                               types_s, types_t, spec, par);
      if (!g.grad_zs.allFinite() || !g.grad_zt.allFinite() ||
          !g.grad_beta_s.allFinite() || !g.grad_beta_t.allFinite())
        throw numerical_error("hetero embedding gradient is non-finite");
      azs.step(st.Zs, g.grad_zs, t, opt, lr);
      azt.step(st.Zt, g.grad_zt, t, opt, lr);
      abs_.step(bs, Mat(g.grad_beta_s), t, opt, lr);
      abt.step(bt, Mat(g.grad_beta_t), t, opt, lr);
      st.beta_s = bs;
      st.beta_t = bt;
    }
    if (objective_of(st) <= f0 + 1e-6) return st;
  }
  return st0;
}

}  // namespace pgmatch

#endif  // PGMATCH_HETERO_HPP
