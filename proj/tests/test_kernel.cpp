#include <catch2/catch_amalgamated.hpp>

#include "oracle.hpp"
#include "pgmatch/kernel.hpp"

using namespace pgmatch;

TEST_CASE("cross-kernel backward matches finite differences", "[kernel]") {
  auto eng = std::mt19937_64(21);
  for (double delta : {1.0, 4.0}) {
    KernelConfig cfg{delta};
    Mat Za = oracle::rand_gauss(eng, 4, 3);
    Mat Zb = oracle::rand_gauss(eng, 5, 3);
    const Mat S = oracle::rand_mat(eng, 4, 5, -1.0, 1.0);  // sensitivities

    Mat ga, gb;
    embedding_kernel_backward(Za, Zb, S, cfg, ga, gb);

    auto f = [&] { return (S.array() * embedding_kernel(Za, Zb, cfg).array()).sum(); };
    const Mat fa = oracle::fdiff_grad(Za, f);
    const Mat fb = oracle::fdiff_grad(Zb, f);
    REQUIRE(oracle::rel_err(ga, fa) < 1e-6);
    REQUIRE(oracle::rel_err(gb, fb) < 1e-6);
  }
}

TEST_CASE("self-kernel backward matches finite differences", "[kernel]") {
  auto eng = std::mt19937_64(22);
  for (double delta : {1.0, 4.0}) {
    KernelConfig cfg{delta};
    Mat Z = oracle::rand_gauss(eng, 5, 3);
    const Mat S = oracle::rand_mat(eng, 5, 5, -1.0, 1.0);

    const Mat g = embedding_self_kernel_backward(Z, S, cfg);
    auto f = [&] { return (S.array() * embedding_self_kernel(Z, cfg).array()).sum(); };
    const Mat fd = oracle::fdiff_grad(Z, f);
    REQUIRE(oracle::rel_err(g, fd) < 1e-6);
  }
}

TEST_CASE("kernel bandwidth sharpens distances monotonically", "[kernel]") {
  Mat Z(2, 2);
  Z << 1, 0, 0, 1;  // fixed cosine 0 pair
  const double k1 = embedding_kernel(Z, Z, KernelConfig{1.0})(0, 1);
  const double k4 = embedding_kernel(Z, Z, KernelConfig{4.0})(0, 1);
  REQUIRE(k4 > k1);  // larger bandwidth penalizes the same misalignment more
  REQUIRE(k4 < 1.0);
}

TEST_CASE("backward handles rectangular shapes and zero sensitivities", "[kernel]") {
  auto eng = std::mt19937_64(23);
  KernelConfig cfg{2.0};
  Mat Za = oracle::rand_gauss(eng, 3, 4);
  Mat Zb = oracle::rand_gauss(eng, 6, 4);
  Mat ga, gb;
  embedding_kernel_backward(Za, Zb, Mat::Zero(3, 6), cfg, ga, gb);
  REQUIRE(ga.norm() == 0.0);
  REQUIRE(gb.norm() == 0.0);
  REQUIRE(ga.rows() == 3);
  REQUIRE(gb.rows() == 6);
}
