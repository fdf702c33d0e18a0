#ifndef PGMATCH_COMMON_HPP
#define PGMATCH_COMMON_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace pgmatch {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Validation failure: bad shapes, bad config values, malformed input files.
struct invalid_input : std::runtime_error {
  explicit invalid_input(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: vanished plans, non-finite gradients, overflow.
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Floor applied inside logs and KL ratios; entries at or below it count as zero.
inline constexpr double kMassFloor = 1e-30;

// splitmix64: cheap, well-mixed stream splitter. Every component that needs
// randomness derives its own engine as mt19937_64(split_seed(root, tag...)),
// so one root seed reproduces a whole run regardless of evaluation order.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b) {
  return split_seed(split_seed(seed, a), b);
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t tag) {
  return std::mt19937_64(split_seed(seed, tag));
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t a,
                                   std::uint64_t b) {
  return std::mt19937_64(split_seed(seed, a, b));
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw invalid_input(what);
}

inline void require_finite(const Mat& m, const std::string& name) {
  if (!m.allFinite()) throw numerical_error(name + " has non-finite entries");
}

}  // namespace pgmatch

#endif  // PGMATCH_COMMON_HPP
