#include <catch2/catch_amalgamated.hpp>

#include "oracle.hpp"
#include "pgmatch/graph.hpp"
#include "pgmatch/kernel.hpp"

using namespace pgmatch;

namespace {
Graph make_graph(const Mat& W) {
  Graph g;
  g.weights = W;
  return g;
}
}  // namespace

TEST_CASE("build_measure normalizes edge mass row sums", "[graph]") {
  Mat path(2, 2);
  path << 0, 1, 1, 0;
  Vec mu = build_measure(make_graph(path));
  REQUIRE(mu(0) == Catch::Approx(0.5).margin(1e-15));
  REQUIRE(mu(1) == Catch::Approx(0.5).margin(1e-15));

  Mat star(3, 3);
  star << 0, 1, 1, 1, 0, 0, 1, 0, 0;
  mu = build_measure(make_graph(star));
  REQUIRE(mu(0) == Catch::Approx(0.5).margin(1e-15));
  REQUIRE(mu(1) == Catch::Approx(0.25).margin(1e-15));
  REQUIRE(mu(2) == Catch::Approx(0.25).margin(1e-15));
}

TEST_CASE("build_measure rejects graphs with no edge mass", "[graph]") {
  REQUIRE_THROWS_MATCHES(build_measure(make_graph(Mat::Zero(2, 2))),
                         invalid_input,
                         Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring(
                             "degenerate graph: no edge mass")));
}

TEST_CASE("build_measure sums to one on random weighted graphs", "[graph]") {
  auto eng = std::mt19937_64(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(eng() % 7);
    Mat W = oracle::rand_sym(eng, n, 0.0, 2.0);
    W.diagonal().setZero();
    const Vec mu = build_measure(make_graph(W));
    REQUIRE(std::abs(mu.sum() - 1.0) < 1e-12);
    for (int i = 0; i < n; ++i) {
      REQUIRE(mu(i) >= 0.0);
      if (W.row(i).sum() > 0.0) REQUIRE(mu(i) > 0.0);
    }
  }
}

TEST_CASE("structural dissimilarity applies 1/(1+w)", "[graph]") {
  Mat W(2, 2);
  W << 0, 1, 1, 0;
  Graph g = make_graph(W);
  Mat G = structural_dissimilarity(g);
  REQUIRE(G(0, 0) == Catch::Approx(1.0));   // w = 0
  REQUIRE(G(0, 1) == Catch::Approx(0.5));   // w = 1
  W(0, 1) = W(1, 0) = 3.0;
  G = structural_dissimilarity(make_graph(W));
  REQUIRE(G(0, 1) == Catch::Approx(0.25));  // w = 3
  REQUIRE(G.isApprox(G.transpose(), 1e-15));
}

TEST_CASE("embedding kernel hits analytic values at delta=1", "[graph][kernel]") {
  KernelConfig cfg{1.0};
  Mat Z(3, 2);
  Z << 1, 0,   // reference
      0, 1,    // orthogonal
      -1, 0;   // antipodal
  const Mat K = embedding_kernel(Z, Z, cfg);
  REQUIRE(K(0, 0) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(K(0, 1) == Catch::Approx(1.0 - std::exp(-1.0)).epsilon(1e-10));
  REQUIRE(K(0, 2) == Catch::Approx(1.0 - std::exp(-2.0)).epsilon(1e-10));
}

TEST_CASE("embedding kernel range, symmetry, and scale invariance", "[graph][kernel]") {
  auto eng = std::mt19937_64(11);
  for (double delta : {0.5, 1.0, 4.0}) {
    KernelConfig cfg{delta};
    const Mat Z = oracle::rand_gauss(eng, 6, 3);
    const Mat K = embedding_kernel(Z, Z, cfg);
    REQUIRE(K.minCoeff() >= -1e-12);
    REQUIRE(K.maxCoeff() <= 1.0 - std::exp(-2.0 * delta) + 1e-12);
    REQUIRE(K.isApprox(K.transpose(), 1e-12));

    const Mat S = embedding_self_kernel(Z, cfg);
    for (int i = 0; i < S.rows(); ++i) REQUIRE(S(i, i) == 0.0);

    Mat Z2 = Z;
    Z2.row(0) *= 7.5;  // cosine-based, so row rescaling is invisible
    Z2.row(3) *= 0.01;
    REQUIRE(embedding_kernel(Z2, Z2, cfg).isApprox(K, 1e-9));
  }
}

TEST_CASE("embedding kernel rejects zero-norm rows", "[graph][kernel]") {
  Mat Z = Mat::Zero(2, 3);
  Z(0, 0) = 1.0;
  REQUIRE_THROWS_MATCHES(embedding_kernel(Z, Z, KernelConfig{1.0}),
                         numerical_error,
                         Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring(
                             "undefined cosine")));
}

TEST_CASE("feature cosine weights map cosine to [0,1] on edges", "[graph]") {
  Mat X(3, 2);
  X << 1, 0,   // equal to row 0 of itself
      0, 1,    // orthogonal to row 0
      -1, 0;   // antipodal to row 0
  Mat adj = Mat::Ones(3, 3);
  adj.diagonal().setZero();
  const Mat W = feature_cosine_weights(X, adj);
  // w = 1/2 + cos/2 on existing edges
  REQUIRE(W(0, 1) == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(W(0, 2) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(W(1, 2) == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(W.isApprox(W.transpose(), 1e-12));
  for (int i = 0; i < 3; ++i) REQUIRE(W(i, i) == 0.0);

  Mat X2(2, 2);
  X2 << 1, 1, 1, 1;  // identical feature rows
  Mat adj2 = Mat::Ones(2, 2);
  adj2.diagonal().setZero();
  REQUIRE(feature_cosine_weights(X2, adj2)(0, 1) == Catch::Approx(1.0));
}

TEST_CASE("feature cosine weights respect the adjacency mask", "[graph]") {
  auto eng = std::mt19937_64(3);
  const Mat X = oracle::rand_gauss(eng, 4, 3);
  Mat adj = Mat::Zero(4, 4);
  adj(0, 1) = adj(1, 0) = 1.0;  // single edge
  const Mat W = feature_cosine_weights(X, adj);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (!(i == 0 && j == 1) && !(i == 1 && j == 0)) REQUIRE(W(i, j) == 0.0);
  REQUIRE(W(0, 1) >= 0.0);
  REQUIRE(W(0, 1) <= 1.0);
}

TEST_CASE("graph validation rejects malformed inputs", "[graph]") {
  Mat W(2, 2);
  W << 0, 1, 1, 0;
  Graph g = make_graph(W);
  REQUIRE_NOTHROW(g.validate());

  Graph asym = g;
  asym.weights(0, 1) = 2.0;
  REQUIRE_THROWS_AS(asym.validate(), invalid_input);

  Graph neg = g;
  neg.weights(0, 1) = neg.weights(1, 0) = -1.0;
  REQUIRE_THROWS_AS(neg.validate(), invalid_input);

  Graph diag = g;
  diag.weights(0, 0) = 1.0;
  REQUIRE_THROWS_AS(diag.validate(), invalid_input);

  Graph typed = g;
  typed.node_types = {0, 2};  // type id outside the declared vocabulary
  typed.type_names = {"a", "b"};
  REQUIRE_THROWS_AS(typed.validate(), invalid_input);
}
