#ifndef PGMATCH_GRAPH_HPP
#define PGMATCH_GRAPH_HPP

#include <string>
#include <vector>

#include "pgmatch/common.hpp"

namespace pgmatch {

// Undirected weighted graph with optional node features and type labels.
// W is dense: at the few-hundred-node scale this library targets, the cubic
// solver dominates and sparse storage would buy nothing.
struct Graph {
  Mat weights;                  // symmetric, nonnegative, zero diagonal
  Mat features;                 // |V| x D, or 0x0 when absent
  std::vector<int> node_types;  // empty when homogeneous
  std::vector<std::string> type_names;

  int node_count() const { return static_cast<int>(weights.rows()); }
  bool has_features() const { return features.size() > 0; }
  bool has_types() const { return !node_types.empty(); }

  void validate() const {
    const int n = node_count();
    require(weights.cols() == n, "graph: weight matrix must be square");
    require(n > 0, "graph: empty node set");
    for (int i = 0; i < n; ++i) {
      require(weights(i, i) == 0.0, "graph: nonzero diagonal weight");
      for (int j = i + 1; j < n; ++j) {
        require(weights(i, j) >= 0.0, "graph: negative edge weight");
        require(weights(i, j) == weights(j, i), "graph: asymmetric weights");
      }
    }
    if (has_features()) {
      require(features.rows() == n, "graph: feature row count mismatch");
      require(features.allFinite(), "graph: non-finite feature");
    }
    if (has_types()) {
      require(static_cast<int>(node_types.size()) == n,
              "graph: type label count mismatch");
      const int nt = static_cast<int>(type_names.size());
      for (int t : node_types)
        require(t >= 0 && t < nt, "graph: type label outside declared set");
    }
  }
};

// Node-mass measure: row sums of W over total weight. Isolated nodes get
// zero mass; the solver's projections treat 0/0 as 0 so that is harmless.
inline Vec build_measure(const Graph& g) {
  const Vec row_sums = g.weights.rowwise().sum();
  const double total = row_sums.sum();
  if (total <= 0.0) throw invalid_input("degenerate graph: no edge mass");
  return row_sums / total;
}

// Structural dissimilarity G = [1/(1+w_ij)]: non-edges sit at 1, heavier
// edges approach 0.
inline Mat structural_dissimilarity(const Graph& g) {
  return (1.0 + g.weights.array()).inverse().matrix();
}

// Edge weights from feature cosine similarity rescaled to [0,1], masked by
// an adjacency pattern (only existing edges keep a weight).
inline Mat feature_cosine_weights(const Mat& X, const Mat& adjacency) {
  const int n = static_cast<int>(X.rows());
  require(adjacency.rows() == n && adjacency.cols() == n,
          "cosine weights: adjacency shape mismatch");
  Vec norms = X.rowwise().norm();
  for (int i = 0; i < n; ++i)
    if (norms(i) <= 0.0)
      throw invalid_input("cosine weights: zero-norm feature row " +
                          std::to_string(i));
  Mat cos = (X * X.transpose()).array().colwise() / norms.array();
  cos = cos.array().rowwise() / norms.transpose().array();
  Mat w = 0.5 + 0.5 * cos.array();
  w = (adjacency.array() > 0.0).select(w, Mat::Zero(n, n));
  w.diagonal().setZero();
  return (w + w.transpose()) / 2.0;  // scrub asymmetric rounding noise
}

}  // namespace pgmatch

#endif  // PGMATCH_GRAPH_HPP
