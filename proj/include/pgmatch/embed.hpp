#ifndef PGMATCH_EMBED_HPP
#define PGMATCH_EMBED_HPP

#include <cmath>
#include <optional>
#include <utility>

#include "pgmatch/common.hpp"
#include "pgmatch/kernel.hpp"
#include "pgmatch/pot.hpp"

namespace pgmatch {

struct EmbedOptConfig {
  int dim = 16;
  double lr = 1e-2;
  int epochs = 100;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  KernelConfig kernel;
};

// Optional anchor distances for node pairs whose correspondence is known a
// priori. Only entries with mask=true participate in the regularizer.
struct GroundTruthDistance {
  Mat values;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask;
  bool empty() const { return values.size() == 0; }
};

// Fused pairwise cost: structure blended with the embedding self-kernel.
inline Mat fused_cost(const Mat& g_struct, const Mat& Z, double alpha,
                      const KernelConfig& cfg = {}) {
  if (alpha == 0.0) return g_struct;
  return (1.0 - alpha) * g_struct + alpha * embedding_self_kernel(Z, cfg);
}

// Self-fit regularizer: squared Frobenius distance between each graph's
// embedding kernel and its structural dissimilarity, plus an optional
// cross-graph anchor term.
inline double homo_regularizer(const Mat& Zs, const Mat& Zt, const Mat& Gs,
                               const Mat& Gt, const GroundTruthDistance& gst,
                               const KernelConfig& cfg = {}) {
  const Mat Kss = embedding_self_kernel(Zs, cfg);
  const Mat Ktt = embedding_self_kernel(Zt, cfg);
  double r = (Kss - Gs).squaredNorm() + (Ktt - Gt).squaredNorm();
  if (!gst.empty()) {
    const Mat Kst = embedding_kernel(Zs, Zt, cfg);
    for (int i = 0; i < Kst.rows(); ++i)
      for (int j = 0; j < Kst.cols(); ++j)
        if (gst.mask(i, j)) {
          const double d = Kst(i, j) - gst.values(i, j);
          r += d * d;
        }
  }
  return r;
}

struct EmbeddingGradients {
  double objective = 0.0;
  Mat grad_s;
  Mat grad_t;
};

// Objective of the embedding subproblem at a fixed plan T:
//   <L(Cs(Zs), Ct(Zt), T), T> + alpha <K(Zs,Zt), T> + alpha1 R(Zs, Zt)
// with Cs = (1-alpha) Gs + alpha K(Zs,Zs), square loss throughout.
//
// Gradients are closed-form. Writing p = T 1, q = T' 1:
//   dE/dCs = 2 Cs .* (mu_s p') - 2 T Ct T'
//   dE/dCt = 2 Ct .* (mu_t q') - 2 T' Cs T
// then chained through the cosine kernel (diagonals of the self-kernels are
// pinned and carry no gradient).
inline EmbeddingGradients embedding_objective_grad(
    const Mat& Zs, const Mat& Zt, const Mat& Gs, const Mat& Gt, const Mat& T,
    double alpha, double alpha1, const PartialCouplingSpec& spec,
    const GroundTruthDistance& gst = {}, const KernelConfig& cfg = {}) {
  const Mat Kss = embedding_self_kernel(Zs, cfg);
  const Mat Ktt = embedding_self_kernel(Zt, cfg);
  const Mat Kst = embedding_kernel(Zs, Zt, cfg);
  const Mat Cs = (1.0 - alpha) * Gs + alpha * Kss;
  const Mat Ct = (1.0 - alpha) * Gt + alpha * Ktt;
  const Vec p = T.rowwise().sum();
  const Vec q = T.colwise().sum().transpose();

  EmbeddingGradients out;
  out.objective = spec.mu_s.dot(Cs.array().square().matrix() * p) +
                  spec.mu_t.dot(Ct.array().square().matrix() * q) -
                  2.0 * ((Cs * T * Ct).array() * T.array()).sum();
  out.objective += alpha * (Kst.array() * T.array()).sum();
  double reg = (Kss - Gs).squaredNorm() + (Ktt - Gt).squaredNorm();

  Mat dCs = (2.0 * Cs.array() * (spec.mu_s * p.transpose()).array()).matrix() -
            2.0 * T * Ct * T.transpose();
  Mat dCt = (2.0 * Ct.array() * (spec.mu_t * q.transpose()).array()).matrix() -
            2.0 * T.transpose() * Cs * T;
  Mat dKss = alpha * dCs + 2.0 * alpha1 * (Kss - Gs);
  Mat dKtt = alpha * dCt + 2.0 * alpha1 * (Ktt - Gt);
  dKss.diagonal().setZero();
  dKtt.diagonal().setZero();
  Mat dKst = alpha * T;
  if (!gst.empty()) {
    for (int i = 0; i < Kst.rows(); ++i)
      for (int j = 0; j < Kst.cols(); ++j)
        if (gst.mask(i, j)) {
          const double d = Kst(i, j) - gst.values(i, j);
          reg += d * d;
          dKst(i, j) += 2.0 * alpha1 * d;
        }
  }
  out.objective += alpha1 * reg;

  out.grad_s = embedding_self_kernel_backward(Zs, dKss, cfg);
  out.grad_t = embedding_self_kernel_backward(Zt, dKtt, cfg);
  Mat ga, gb;
  embedding_kernel_backward(Zs, Zt, dKst, cfg, ga, gb);
  out.grad_s += ga;
  out.grad_t += gb;
  return out;
}

inline double embedding_objective(const Mat& Zs, const Mat& Zt, const Mat& Gs,
                                  const Mat& Gt, const Mat& T, double alpha,
                                  double alpha1, const PartialCouplingSpec& spec,
                                  const GroundTruthDistance& gst = {},
                                  const KernelConfig& cfg = {}) {
  return embedding_objective_grad(Zs, Zt, Gs, Gt, T, alpha, alpha1, spec, gst,
                                  cfg).objective;
}

namespace detail {

struct AdamState {
  Mat m, v;
  explicit AdamState(const Mat& like)
      : m(Mat::Zero(like.rows(), like.cols())),
        v(Mat::Zero(like.rows(), like.cols())) {}

  void step(Mat& x, const Mat& g, int t, const EmbedOptConfig& opt,
            double lr) {
    m = opt.beta1 * m + (1.0 - opt.beta1) * g;
    v = opt.beta2 * v + (1.0 - opt.beta2) * g.array().square().matrix();
    const double c1 = 1.0 - std::pow(opt.beta1, t);
    const double c2 = 1.0 - std::pow(opt.beta2, t);
    x -= lr * ((m / c1).array() / ((v / c2).array().sqrt() + opt.eps)).matrix();
  }
};

}  // namespace detail

// Full-batch Adam on the embedding subproblem. If a full run ends above its
// starting objective (beyond slack), it is retried once from the original
// tables at half the learning rate.
inline std::pair<Mat, Mat> optimize_embeddings(
    const Mat& Zs0, const Mat& Zt0, const Mat& Gs, const Mat& Gt, const Mat& T,
    double alpha, double alpha1, const PartialCouplingSpec& spec,
    const EmbedOptConfig& opt, const GroundTruthDistance& gst = {}) {
  const double f0 = embedding_objective(Zs0, Zt0, Gs, Gt, T, alpha, alpha1,
                                        spec, gst, opt.kernel);
  for (double lr : {opt.lr, opt.lr / 2.0}) {
    Mat Zs = Zs0, Zt = Zt0;
    detail::AdamState as(Zs), at(Zt);
    for (int t = 1; t <= opt.epochs; ++t) {
      auto g = embedding_objective_grad(Zs, Zt, Gs, Gt, T, alpha, alpha1, spec,
                                        gst, opt.kernel);
      if (!g.grad_s.allFinite() || !g.grad_t.allFinite())
        throw numerical_error("embedding gradient is non-finite");
      as.step(Zs, g.grad_s, t, opt, lr);
      at.step(Zt, g.grad_t, t, opt, lr);
    }
    const double f1 = embedding_objective(Zs, Zt, Gs, Gt, T, alpha, alpha1,
                                          spec, gst, opt.kernel);
    if (f1 <= f0 + 1e-6) return {std::move(Zs), std::move(Zt)};
  }
  return {Zs0, Zt0};  // both attempts made things worse; keep the anchor
}

// Embedding table initialization. With node features available the table is
// seeded from them (tiled/truncated to the requested width plus a small
// seeded jitter so duplicated columns cannot lock Adam into mirrored
// updates); otherwise i.i.d. Gaussian N(0, 1/dim). Feature seeding is what
// lets the alternation bootstrap cross-graph alignment when the two sides'
// structures alone are ambiguous.
inline Mat init_embedding(int n, const Mat& features, const EmbedOptConfig& opt,
                          std::uint64_t seed, std::uint64_t stream_tag) {
  auto eng = make_engine(seed, stream_tag);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat Z(n, opt.dim);
  if (features.size() > 0) {
    const int D = static_cast<int>(features.cols());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < opt.dim; ++j)
        Z(i, j) = features(i, j % D) + 1e-3 * gauss(eng);
  } else {
    const double scale = 1.0 / std::sqrt(static_cast<double>(opt.dim));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < opt.dim; ++j) Z(i, j) = scale * gauss(eng);
  }
  return Z;
}

}  // namespace pgmatch

#endif  // PGMATCH_EMBED_HPP
