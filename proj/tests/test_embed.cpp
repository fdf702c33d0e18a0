#include <catch2/catch_amalgamated.hpp>

#include "oracle.hpp"
#include "pgmatch/embed.hpp"

using namespace pgmatch;

namespace {

// angle chosen so the delta=1 kernel value is exactly 0.6
Mat kernel_point_six_pair() {
  const double c = 1.0 - std::log(2.5);  // 1 - exp(-(1-c)) = 0.6
  Mat Z(2, 2);
  Z << 1.0, 0.0, c, std::sqrt(1.0 - c * c);
  return Z;
}

}  // namespace

TEST_CASE("fused cost interpolates structure and kernel", "[embed]") {
  const KernelConfig cfg{1.0};
  Mat G(2, 2);
  G << 0, 1, 1, 0;
  const Mat Z = kernel_point_six_pair();
  const Mat K = embedding_self_kernel(Z, cfg);
  REQUIRE(K(0, 1) == Catch::Approx(0.6).margin(1e-12));

  REQUIRE(fused_cost(G, Z, 0.0, cfg).isApprox(G, 1e-15));
  REQUIRE(fused_cost(G, Z, 1.0, cfg).isApprox(K, 1e-15));

  Mat expect(2, 2);
  expect << 0, 0.8, 0.8, 0;
  REQUIRE(fused_cost(G, Z, 0.5, cfg).isApprox(expect, 1e-12));
  REQUIRE(fused_cost(G, Z, 0.5, cfg)
              .isApprox(fused_cost(G, Z, 0.5, cfg).transpose(), 1e-12));
}

TEST_CASE("regularizer measures kernel-to-structure misfit", "[embed]") {
  const KernelConfig cfg{1.0};
  const Mat Zs = kernel_point_six_pair();
  const Mat Zt = kernel_point_six_pair();
  const Mat K = embedding_self_kernel(Zs, cfg);

  // perfect fit on both graphs
  REQUIRE(homo_regularizer(Zs, Zt, K, K, {}, cfg) ==
          Catch::Approx(0.0).margin(1e-18));

  // shifting the structural target by c off-diagonal costs c^2 per entry
  const double c = 0.15;
  Mat shifted = K;
  shifted(0, 1) += c;
  shifted(1, 0) += c;
  REQUIRE(homo_regularizer(Zs, Zt, shifted, K, {}, cfg) ==
          Catch::Approx(2.0 * c * c).margin(1e-12));
  REQUIRE(homo_regularizer(Zs, Zt, shifted, shifted, {}, cfg) ==
          Catch::Approx(4.0 * c * c).margin(1e-12));

  // a cross-graph anchor term only ever adds
  GroundTruthDistance gst;
  gst.values = Mat::Zero(2, 2);
  gst.mask.setConstant(2, 2, false);
  gst.mask(0, 0) = true;
  REQUIRE(homo_regularizer(Zs, Zt, shifted, K, gst, cfg) >=
          homo_regularizer(Zs, Zt, shifted, K, {}, cfg));
}

TEST_CASE("embedding objective vanishes on a zero plan", "[embed]") {
  auto eng = std::mt19937_64(41);
  const Mat Zs = oracle::rand_gauss(eng, 3, 4);
  const Mat Zt = oracle::rand_gauss(eng, 4, 4);
  const Mat Gs = oracle::rand_sym(eng, 3);
  const Mat Gt = oracle::rand_sym(eng, 4);
  const PartialCouplingSpec spec{oracle::rand_measure(eng, 3),
                                 oracle::rand_measure(eng, 4), 1.0};
  REQUIRE(embedding_objective(Zs, Zt, Gs, Gt, Mat::Zero(3, 4), 0.8, 0.0,
                              spec) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("embedding objective matches transport objective at alpha zero", "[embed]") {
  auto eng = std::mt19937_64(42);
  const Mat G = oracle::rand_sym(eng, 4);
  const Mat Z = oracle::rand_gauss(eng, 4, 3);
  const Vec mu = oracle::rand_measure(eng, 4);
  const PartialCouplingSpec spec{mu, mu, 1.0};
  Mat T = Mat::Zero(4, 4);
  T.diagonal() = mu;  // perfect diagonal plan

  const double emb = embedding_objective(Z, Z, G, G, T, 0.0, 0.0, spec);
  const double pot = objective_eval(G, G, Mat::Zero(4, 4), T, 0.0, spec);
  REQUIRE(emb == Catch::Approx(pot).margin(1e-10));
}

TEST_CASE("embedding objective matches a term-by-term oracle", "[embed]") {
  auto eng = std::mt19937_64(43);
  const KernelConfig kc{1.5};
  const int ns = 4, nt = 5;
  const Mat Zs = oracle::rand_gauss(eng, ns, 3);
  const Mat Zt = oracle::rand_gauss(eng, nt, 3);
  const Mat Gs = oracle::rand_sym(eng, ns);
  const Mat Gt = oracle::rand_sym(eng, nt);
  Mat T = oracle::rand_mat(eng, ns, nt, 0.05, 1.0);
  T /= T.sum();
  const PartialCouplingSpec spec{T.rowwise().sum(),
                                 T.colwise().sum().transpose(), 1.0};
  const double alpha = 0.6, alpha1 = 0.3;

  const double got =
      embedding_objective(Zs, Zt, Gs, Gt, T, alpha, alpha1, spec, {}, kc);

  const Mat Kss = embedding_self_kernel(Zs, kc);
  const Mat Ktt = embedding_self_kernel(Zt, kc);
  const Mat Kst = embedding_kernel(Zs, Zt, kc);
  const Mat Cs = (1 - alpha) * Gs + alpha * Kss;
  const Mat Ct = (1 - alpha) * Gt + alpha * Ktt;
  const Mat L = oracle::gw_loss_quadruple(Cs, Ct, T, square_loss());
  double want = (L.array() * T.array()).sum();
  want += alpha * (Kst.array() * T.array()).sum();
  want += alpha1 * ((Kss - Gs).squaredNorm() + (Ktt - Gt).squaredNorm());
  REQUIRE(got == Catch::Approx(want).margin(1e-10));
}

TEST_CASE("embedding gradients match finite differences", "[embed]") {
  auto eng = std::mt19937_64(44);
  const KernelConfig kc{1.0};
  const int ns = 4, nt = 5;
  Mat Zs = oracle::rand_gauss(eng, ns, 3);
  Mat Zt = oracle::rand_gauss(eng, nt, 3);
  const Mat Gs = oracle::rand_sym(eng, ns);
  const Mat Gt = oracle::rand_sym(eng, nt);
  Mat T = oracle::rand_mat(eng, ns, nt, 0.0, 1.0);
  T /= 2.0 * T.sum();
  const PartialCouplingSpec spec{oracle::rand_measure(eng, ns),
                                 oracle::rand_measure(eng, nt), 0.5};

  GroundTruthDistance gst;
  gst.values = Mat::Zero(ns, nt);
  gst.mask.setConstant(ns, nt, false);
  gst.mask(0, 0) = gst.mask(1, 1) = gst.mask(2, 2) = true;

  for (double alpha : {0.0, 0.5, 1.0}) {
    for (int with_gst = 0; with_gst < 2; ++with_gst) {
      const GroundTruthDistance& anchors =
          with_gst ? gst : GroundTruthDistance{};
      auto g = embedding_objective_grad(Zs, Zt, Gs, Gt, T, alpha, 0.3, spec,
                                        anchors, kc);
      auto f = [&] {
        return embedding_objective(Zs, Zt, Gs, Gt, T, alpha, 0.3, spec,
                                   anchors, kc);
      };
      const Mat fs = oracle::fdiff_grad(Zs, f);
      const Mat ft = oracle::fdiff_grad(Zt, f);
      REQUIRE(oracle::rel_err(g.grad_s, fs) < 1e-4);
      REQUIRE(oracle::rel_err(g.grad_t, ft) < 1e-4);
    }
  }
}

TEST_CASE("objective is invariant to positive row rescaling", "[embed]") {
  auto eng = std::mt19937_64(45);
  const KernelConfig kc{2.0};
  Mat Zs = oracle::rand_gauss(eng, 4, 3);
  const Mat Zt = oracle::rand_gauss(eng, 4, 3);
  const Mat G = oracle::rand_sym(eng, 4);
  Mat T = oracle::rand_mat(eng, 4, 4, 0.0, 1.0);
  T /= T.sum();
  const PartialCouplingSpec spec{oracle::rand_measure(eng, 4),
                                 oracle::rand_measure(eng, 4), 1.0};
  const double before =
      embedding_objective(Zs, Zt, G, G, T, 0.5, 0.2, spec, {}, kc);
  Zs.row(1) *= 9.0;
  Zs.row(3) *= 0.05;
  const double after =
      embedding_objective(Zs, Zt, G, G, T, 0.5, 0.2, spec, {}, kc);
  REQUIRE(after == Catch::Approx(before).epsilon(1e-9));
}

TEST_CASE("optimizer leaves embeddings alone without gradient pressure", "[embed]") {
  auto eng = std::mt19937_64(46);
  const Mat Zs = oracle::rand_gauss(eng, 3, 4);
  const Mat Zt = oracle::rand_gauss(eng, 3, 4);
  const Mat G = oracle::rand_sym(eng, 3);
  const PartialCouplingSpec spec{oracle::rand_measure(eng, 3),
                                 oracle::rand_measure(eng, 3), 1.0};
  EmbedOptConfig opt;
  opt.dim = 4;
  opt.epochs = 20;
  auto [as, at] = optimize_embeddings(Zs, Zt, G, G, Mat::Zero(3, 3), 0.0, 0.0,
                                      spec, opt);
  REQUIRE(as.cwiseEqual(Zs).all());
  REQUIRE(at.cwiseEqual(Zt).all());
}

TEST_CASE("optimizer never worsens the objective and is deterministic", "[embed]") {
  auto eng = std::mt19937_64(47);
  const int n = 5;
  const Mat Zs = oracle::rand_gauss(eng, n, 4);
  const Mat Zt = oracle::rand_gauss(eng, n, 4);
  const Mat G = oracle::rand_sym(eng, n);
  Mat T = oracle::rand_mat(eng, n, n, 0.0, 1.0);
  T /= T.sum();
  const PartialCouplingSpec spec{oracle::rand_measure(eng, n),
                                 oracle::rand_measure(eng, n), 1.0};
  EmbedOptConfig opt;
  opt.dim = 4;
  opt.epochs = 40;

  const double f0 = embedding_objective(Zs, Zt, G, G, T, 0.5, 0.01, spec, {},
                                        opt.kernel);
  auto [as, at] = optimize_embeddings(Zs, Zt, G, G, T, 0.5, 0.01, spec, opt);
  const double f1 = embedding_objective(as, at, G, G, T, 0.5, 0.01, spec, {},
                                        opt.kernel);
  REQUIRE(f1 <= f0 + 1e-6);

  auto [bs, bt] = optimize_embeddings(Zs, Zt, G, G, T, 0.5, 0.01, spec, opt);
  REQUIRE(as.cwiseEqual(bs).all());  // bit-deterministic rerun
  REQUIRE(at.cwiseEqual(bt).all());
}

TEST_CASE("anchored pairs pull matched embeddings together", "[embed]") {
  auto eng = std::mt19937_64(48);
  const int n = 5;
  const Mat G = oracle::rand_sym(eng, n);
  const Mat Zs = oracle::rand_gauss(eng, n, 4);
  const Mat Zt = oracle::rand_gauss(eng, n, 4);
  const Vec mu = Vec::Constant(n, 1.0 / n);
  const PartialCouplingSpec spec{mu, mu, 1.0};
  Mat T = Mat::Zero(n, n);
  T.diagonal().setConstant(1.0 / n);

  GroundTruthDistance gst;  // anchor the true pairs at kernel distance zero
  gst.values = Mat::Zero(n, n);
  gst.mask.setConstant(n, n, false);
  for (int i = 0; i < n; ++i) gst.mask(i, i) = true;

  EmbedOptConfig opt;
  opt.dim = 4;
  opt.epochs = 100;
  auto [as, at] =
      optimize_embeddings(Zs, Zt, G, G, T, 0.5, 0.1, spec, opt, gst);
  const double before = embedding_kernel(Zs, Zt, opt.kernel).diagonal().mean();
  const double after = embedding_kernel(as, at, opt.kernel).diagonal().mean();
  REQUIRE(after < before);
}

TEST_CASE("embedding init is seeded, tagged, and feature-aware", "[embed]") {
  EmbedOptConfig opt;
  opt.dim = 6;
  const Mat none;
  const Mat a = init_embedding(7, none, opt, 123, 1);
  const Mat b = init_embedding(7, none, opt, 123, 1);
  const Mat c = init_embedding(7, none, opt, 123, 2);
  const Mat d = init_embedding(7, none, opt, 124, 1);
  REQUIRE(a.cwiseEqual(b).all());
  REQUIRE(!a.cwiseEqual(c).all());
  REQUIRE(!a.cwiseEqual(d).all());
  for (int i = 0; i < a.rows(); ++i) REQUIRE(a.row(i).norm() > 0.0);

  auto eng = std::mt19937_64(49);
  const Mat X = oracle::rand_gauss(eng, 7, 4);
  const Mat z = init_embedding(7, X, opt, 5, 1);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < opt.dim; ++j) {
      REQUIRE(std::abs(z(i, j) - X(i, j % 4)) < 0.05);  // tiled + small jitter
      REQUIRE(z(i, j) != X(i, j % 4));                   // but never verbatim
    }
}
