#ifndef PGMATCH_POT_HPP
#define PGMATCH_POT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "pgmatch/common.hpp"

namespace pgmatch {

// Marginal caps and the total-mass budget of the partial coupling polytope
//   { T >= 0,  T 1 <= mu_s,  T' 1 <= mu_t,  1' T 1 = b }.
struct PartialCouplingSpec {
  Vec mu_s;
  Vec mu_t;
  double b = 1.0;

  void validate() const {
    require(b > 0.0 && b <= 1.0, "coupling spec: b must be in (0,1]");
    require(mu_s.size() > 0 && mu_t.size() > 0, "coupling spec: empty measure");
    require((mu_s.array() >= 0.0).all() && (mu_t.array() >= 0.0).all(),
            "coupling spec: negative mass");
  }
};

struct SolverConfig {
  double gamma = 0.01;   // proximal weight on KL(T || T_n)
  double tau = 1.0;      // multiplicative-gradient step size
  int outer_iters = 50;  // proximal iterations
  int pgd_iters = 10;    // gradient steps per proximal iteration
  int proj_cycles = 500; // projection cycles per gradient step
  double tol = 1e-6;     // feasibility tolerance
  double floor_val = kMassFloor;

  void validate() const {
    require(gamma > 0 && tau > 0 && outer_iters > 0 && pgd_iters > 0 &&
                proj_cycles > 0 && tol > 0 && floor_val > 0,
            "solver config: all parameters must be positive");
  }
};

// Element-wise factorization ell(a, b) = d1(a) + d2(b) - h1(a) h2(b).
struct LossFactorization {
  std::function<double(double)> d1, d2, h1, h2;

  double loss(double a, double b) const { return d1(a) + d2(b) - h1(a) * h2(b); }
};

inline LossFactorization square_loss() {
  return {[](double a) { return a * a; }, [](double b) { return b * b; },
          [](double a) { return a; }, [](double b) { return 2.0 * b; }};
}

namespace detail {
inline Mat apply(const std::function<double(double)>& f, const Mat& m) {
  return m.unaryExpr([&](double v) { return f(v); });
}
}  // namespace detail

// Pairwise-assignment cost matrix, factorized to three matrix products:
//   L = d1(Cs) mu_s 1' + 1 mu_t' d2(Ct)' - h1(Cs) T h2(Ct).
// The constant terms always weight by the full measures (not the current
// plan's marginals); the brute-force oracle in the tests uses the same
// convention.
inline Mat gw_loss_matrix(const Mat& Cs, const Mat& Ct, const Mat& T,
                          const PartialCouplingSpec& spec,
                          const LossFactorization& fac = square_loss()) {
  const auto ns = Cs.rows(), nt = Ct.rows();
  require(Cs.cols() == ns && Ct.cols() == nt, "gw_loss_matrix: costs not square");
  require(T.rows() == ns && T.cols() == nt, "gw_loss_matrix: plan shape mismatch");
  require(spec.mu_s.size() == ns && spec.mu_t.size() == nt,
          "gw_loss_matrix: measure length mismatch");
  Mat L = (detail::apply(fac.d1, Cs) * spec.mu_s) * Mat::Ones(1, nt);
  L += Mat::Ones(ns, 1) * (spec.mu_t.transpose() * detail::apply(fac.d2, Ct));
  L -= detail::apply(fac.h1, Cs) * T * detail::apply(fac.h2, Ct);
  return L;
}

// Closed-form KL projection onto { T : T 1 <= mu_s }: rescale each
// offending row down to its cap; rows already below cap are untouched.
inline Mat kl_proj_c1(const Mat& g, const Vec& mu_s) {
  Vec rs = g.rowwise().sum();
  Vec scale(rs.size());
  for (int i = 0; i < rs.size(); ++i)
    scale(i) = rs(i) > 0.0 ? std::min(mu_s(i) / rs(i), 1.0) : 1.0;
  return scale.asDiagonal() * g;
}

// Column analogue onto { T : T' 1 <= mu_t }.
inline Mat kl_proj_c2(const Mat& g, const Vec& mu_t) {
  Vec cs = g.colwise().sum();
  Vec scale(cs.size());
  for (int j = 0; j < cs.size(); ++j)
    scale(j) = cs(j) > 0.0 ? std::min(mu_t(j) / cs(j), 1.0) : 1.0;
  return g * scale.asDiagonal();
}

// Global rescale onto { T : 1' T 1 = b }.
inline Mat kl_proj_c3(const Mat& g, double b) {
  const double total = g.sum();
  if (total <= kMassFloor) throw numerical_error("vanished plan");
  return g * (b / total);
}

struct ProjectionResult {
  Mat plan;
  bool converged = false;
  int cycles_used = 0;
};

inline double feasibility_residual(const Mat& T, const PartialCouplingSpec& spec) {
  const double r1 = (T.rowwise().sum() - spec.mu_s).cwiseMax(0.0).maxCoeff();
  const double r2 = (T.colwise().sum().transpose() - spec.mu_t).cwiseMax(0.0).maxCoeff();
  const double r3 = std::abs(T.sum() - spec.b);
  return std::max({r1, r2, r3});
}

// Cycle the three closed-form projections (C1, C2, C3 per cycle) until the
// worst constraint residual drops below tol. Non-convergence returns the
// best iterate with converged=false rather than throwing.
inline ProjectionResult periodic_projection(const Mat& g0,
                                            const PartialCouplingSpec& spec,
                                            const SolverConfig& cfg = {}) {
  Mat g = g0;
  for (int c = 0; c < cfg.proj_cycles; ++c) {
    g = kl_proj_c1(g, spec.mu_s);
    g = kl_proj_c2(g, spec.mu_t);
    g = kl_proj_c3(g, spec.b);
    if (feasibility_residual(g, spec) < cfg.tol)
      return {std::move(g), true, c + 1};
  }
  return {std::move(g), false, cfg.proj_cycles};
}

// One KL-geometry projected gradient step against proximal anchor T_n:
//   T <- Proj( T .* exp(-tau * (cost_grad + gamma (log T - log T_n))) ).
// Exponents are clamped to +-50 to keep exp finite.
inline Mat pgd_step(const Mat& T, const Mat& T_n, const Mat& cost_grad,
                    const PartialCouplingSpec& spec, const SolverConfig& cfg) {
  Mat grad = cost_grad;
  grad += cfg.gamma *
          (T.array().max(cfg.floor_val).log() - T_n.array().max(cfg.floor_val).log())
              .matrix();
  Mat g0 = T.array() * (-cfg.tau * grad.array()).min(50.0).max(-50.0).exp();
  return periodic_projection(g0, spec, cfg).plan;
}

// Full objective of the OT subproblem: <L(T), T> + alpha <K, T>.
inline double objective_eval(const Mat& Cs, const Mat& Ct, const Mat& K_cross,
                             const Mat& T, double alpha,
                             const PartialCouplingSpec& spec,
                             const LossFactorization& fac = square_loss(),
                             bool with_gw = true) {
  double val = alpha * (K_cross.array() * T.array()).sum();
  if (with_gw)
    val += (gw_loss_matrix(Cs, Ct, T, spec, fac).array() * T.array()).sum();
  return val;
}

struct SolveTraceRow {
  int outer = 0;
  int inner = 0;
  double objective = 0.0;
  double residual_c1 = 0.0;
  double residual_c2 = 0.0;
  double residual_c3 = 0.0;
};

// Proximal point solver for the partial-OT subproblem. Each outer iteration
// anchors a KL term at the previous plan and runs pgd_iters multiplicative
// gradient steps; with_gw=false drops the pairwise term entirely (pure
// partial-Wasserstein mode).
inline Mat proximal_solve(const Mat& Cs, const Mat& Ct, const Mat& K_cross,
                          double alpha, const PartialCouplingSpec& spec,
                          const SolverConfig& cfg, const Mat& T_init,
                          bool with_gw = true,
                          std::vector<SolveTraceRow>* trace = nullptr,
                          const LossFactorization& fac = square_loss()) {
  spec.validate();
  cfg.validate();
  Mat T_n = T_init.array().max(cfg.floor_val).matrix();
  double obj_n =
      objective_eval(Cs, Ct, K_cross, T_n, alpha, spec, fac, with_gw);
  for (int n = 0; n < cfg.outer_iters; ++n) {
    // Fixed-step mirror descent can overshoot near a constrained optimum,
    // which would let the outer objective creep upward; accept an inner
    // pass only if it did not worsen the objective, retrying with halved
    // steps and otherwise keeping the anchor. Fixed points are unaffected.
    SolverConfig icfg = cfg;
    for (int attempt = 0; attempt < 3; ++attempt) {
      Mat T = T_n;
      for (int l = 0; l < cfg.pgd_iters; ++l) {
        Mat grad = alpha * K_cross;
        if (with_gw) grad += 2.0 * gw_loss_matrix(Cs, Ct, T, spec, fac);
        T = pgd_step(T, T_n, grad, spec, icfg);
      }
      T = T.array().max(cfg.floor_val).matrix();
      const double obj_c =
          objective_eval(Cs, Ct, K_cross, T, alpha, spec, fac, with_gw);
      if (obj_c <= obj_n) {
        T_n = std::move(T);
        obj_n = obj_c;
        break;
      }
      icfg.tau /= 2.0;
    }
    if (trace) {
      const double r1 = (T_n.rowwise().sum() - spec.mu_s).cwiseMax(0.0).maxCoeff();
      const double r2 =
          (T_n.colwise().sum().transpose() - spec.mu_t).cwiseMax(0.0).maxCoeff();
      const double r3 = std::abs(T_n.sum() - spec.b);
      trace->push_back({n, cfg.pgd_iters, obj_n, r1, r2, r3});
    }
  }
  require_finite(T_n, "transport plan");
  return T_n;
}

// Feasible default start: independent coupling scaled to the mass budget.
inline Mat product_plan(const PartialCouplingSpec& spec) {
  return spec.b * (spec.mu_s * spec.mu_t.transpose());
}

}  // namespace pgmatch

#endif  // PGMATCH_POT_HPP
