#ifndef PGMATCH_KERNEL_HPP
#define PGMATCH_KERNEL_HPP

#include <cmath>
#include <string>

#include "pgmatch/common.hpp"

namespace pgmatch {

struct KernelConfig {
  double delta = 4.0;  // bandwidth of the exponential cosine kernel
};

namespace detail {

inline Vec checked_row_norms(const Mat& Z, const char* who) {
  Vec norms = Z.rowwise().norm();
  for (int i = 0; i < norms.size(); ++i)
    if (norms(i) <= 0.0)
      throw numerical_error(std::string(who) + ": undefined cosine for zero-norm row " +
                            std::to_string(i));
  return norms;
}

inline Mat cosine_matrix(const Mat& Za, const Mat& Zb, const char* who) {
  const Vec na = checked_row_norms(Za, who);
  const Vec nb = checked_row_norms(Zb, who);
  Mat cos = Za * Zb.transpose();
  cos = (cos.array().colwise() / na.array()).matrix();
  cos = (cos.array().rowwise() / nb.transpose().array()).matrix();
  return cos;
}

}  // namespace detail

// Embedding distance kernel K_ij = 1 - exp(-delta * (1 - cos(z_i, z'_j))).
// Ranges over [0, 1 - e^{-2 delta}]; zero iff the rows are positively aligned.
inline Mat embedding_kernel(const Mat& Za, const Mat& Zb,
                            const KernelConfig& cfg = {}) {
  const Mat cos = detail::cosine_matrix(Za, Zb, "embedding_kernel");
  return (1.0 - (-cfg.delta * (1.0 - cos.array())).exp()).matrix();
}

// Self-kernel with the diagonal pinned to zero (a node is never dissimilar
// to itself; numerically cos(z,z)=1 already gives 0, this removes noise).
inline Mat embedding_self_kernel(const Mat& Z, const KernelConfig& cfg = {}) {
  Mat K = embedding_kernel(Z, Z, cfg);
  K.diagonal().setZero();
  return K;
}

// Backward pass of sum(S .* K(Za, Zb)) with respect to both embedding
// tables, for an arbitrary upstream weight matrix S.
//
// With u = cos(z_a, z_b):  dK/du = -delta * exp(-delta (1-u)),
// and d u / d z_a = z_b/(|za||zb|) - u * z_a/|za|^2.
inline void embedding_kernel_backward(const Mat& Za, const Mat& Zb,
                                      const Mat& S, const KernelConfig& cfg,
                                      Mat& grad_a, Mat& grad_b) {
  const Vec na = detail::checked_row_norms(Za, "kernel backward");
  const Vec nb = detail::checked_row_norms(Zb, "kernel backward");
  const Mat U = detail::cosine_matrix(Za, Zb, "kernel backward");
  const Mat W =
      (S.array() * (-cfg.delta) * (-cfg.delta * (1.0 - U.array())).exp())
          .matrix();
  const Mat Zah = (Za.array().colwise() / na.array()).matrix();
  const Mat Zbh = (Zb.array().colwise() / nb.array()).matrix();
  const Vec row_fac =
      ((W.array() * U.array()).rowwise().sum() / na.array().square()).matrix();
  const Vec col_fac = ((W.array() * U.array()).colwise().sum().transpose() /
                       nb.array().square())
                          .matrix();
  grad_a = ((W * Zbh).array().colwise() / na.array()).matrix() -
           (Za.array().colwise() * row_fac.array()).matrix();
  grad_b = ((W.transpose() * Zah).array().colwise() / nb.array()).matrix() -
           (Zb.array().colwise() * col_fac.array()).matrix();
}

// Backward pass of sum(S .* K(Z, Z)) for a self-kernel whose diagonal is
// pinned (the diagonal of S is ignored). Both argument slots of K are the
// same table, so the effective weight folds S with its transpose.
inline Mat embedding_self_kernel_backward(const Mat& Z, const Mat& S,
                                          const KernelConfig& cfg = {}) {
  Mat S2 = S + S.transpose();
  S2.diagonal().setZero();
  const Vec n = detail::checked_row_norms(Z, "self-kernel backward");
  const Mat U = detail::cosine_matrix(Z, Z, "self-kernel backward");
  Mat W =
      (S2.array() * (-cfg.delta) * (-cfg.delta * (1.0 - U.array())).exp())
          .matrix();
  W.diagonal().setZero();
  const Mat Zh = (Z.array().colwise() / n.array()).matrix();
  const Vec row_fac =
      ((W.array() * U.array()).rowwise().sum() / n.array().square()).matrix();
  return ((W * Zh).array().colwise() / n.array()).matrix() -
         (Z.array().colwise() * row_fac.array()).matrix();
}

}  // namespace pgmatch

#endif  // PGMATCH_KERNEL_HPP
