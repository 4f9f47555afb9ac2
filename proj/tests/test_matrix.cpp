#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "weakrev/matrix.hpp"
#include "weakrev/rng.hpp"

using namespace weakrev;

namespace {

cplx random_cplx(SplitMix64& rng) {
  return cplx{2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0};
}

template <std::size_t N>
Matrix<N> random_matrix(SplitMix64& rng) {
  Matrix<N> m;
  for (std::size_t r = 0; r < N; ++r)
    for (std::size_t c = 0; c < N; ++c) m(r, c) = random_cplx(rng);
  return m;
}

template <std::size_t N>
Matrix<N> random_hermitian(SplitMix64& rng) {
  const Matrix<N> m = random_matrix<N>(rng);
  return 0.5 * (m + m.adjoint());
}

}  // namespace

TEST_CASE("2x2 Hermitian eigenvalues, closed form") {
  Matrix2 diag;
  diag(0, 0) = 1.0;
  auto ev = hermitian_eigenvalues_2x2(diag);
  CHECK(ev[0] == Catch::Approx(0.0).margin(1e-15));
  CHECK(ev[1] == Catch::Approx(1.0).margin(1e-15));

  Matrix2 x;
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;
  ev = hermitian_eigenvalues_2x2(x);
  CHECK(ev[0] == Catch::Approx(-1.0).margin(1e-15));
  CHECK(ev[1] == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("Jacobi agrees with the 2x2 closed form") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix2 h = random_hermitian<2>(rng);
    const auto closed = hermitian_eigenvalues_2x2(h);
    const auto jacobi = hermitian_eigensystem(h);
    CHECK(jacobi.values[0] == Catch::Approx(closed[0]).margin(1e-12));
    CHECK(jacobi.values[1] == Catch::Approx(closed[1]).margin(1e-12));
  }
}

TEST_CASE("Jacobi eigensystem reconstructs 4x4 Hermitian matrices") {
  SplitMix64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix4 h = random_hermitian<4>(rng);
    const HermitianEigen<4> eig = hermitian_eigensystem(h);

    // Reconstruction sum lambda_i v_i v_i^dag.
    Matrix4 rebuilt;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c)
          rebuilt(r, c) +=
              eig.values[i] * eig.vectors(r, i) * std::conj(eig.vectors(c, i));
    CHECK(max_abs_diff(rebuilt, h) < 1e-12);

    // Eigenvector orthonormality and ascending order.
    const Matrix4 gram = eig.vectors.adjoint() * eig.vectors;
    CHECK(max_abs_diff(gram, Matrix4::identity()) < 1e-12);
    for (std::size_t i = 0; i + 1 < 4; ++i) CHECK(eig.values[i] <= eig.values[i + 1]);

    // Trace is the eigenvalue sum.
    const double sum = eig.values[0] + eig.values[1] + eig.values[2] + eig.values[3];
    CHECK(sum == Catch::Approx(h.trace().real()).margin(1e-12));
  }
}

TEST_CASE("solve_linear solves well-conditioned systems and rejects singular ones") {
  SplitMix64 rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix4 a = random_matrix<4>(rng) + 3.0 * Matrix4::identity();
    std::array<cplx, 4> b;
    for (auto& e : b) e = random_cplx(rng);
    const auto x = solve_linear(a, b);
    const auto ax = a * x;
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(ax[i] - b[i]) < 1e-10);
  }

  Matrix4 singular;
  singular(0, 0) = 1.0;
  singular(1, 1) = 1.0;
  singular(2, 2) = 1.0;  // rank 3
  std::array<cplx, 4> rhs{1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(solve_linear(singular, rhs), std::invalid_argument);
}

TEST_CASE("kron matches the column-major vec identity vec(AXB) = kron(B^T, A) vec(X)") {
  SplitMix64 rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix2 a = random_matrix<2>(rng);
    const Matrix2 x = random_matrix<2>(rng);
    const Matrix2 b = random_matrix<2>(rng);
    const auto lhs = vec(a * x * b);
    const auto rhs = kron(b.transpose(), a) * vec(x);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(lhs[i] - rhs[i]) < 1e-12);
  }
}

TEST_CASE("operator norm") {
  Matrix2 m;
  m(0, 0) = 1.0;
  m(1, 1) = 0.3;
  CHECK(operator_norm_2x2(m) == Catch::Approx(1.0).margin(1e-14));

  // Norm is unitarily invariant: scaled rotation has norm = scale.
  const double th = 0.7;
  Matrix2 rot;
  rot(0, 0) = std::cos(th);
  rot(0, 1) = -std::sin(th);
  rot(1, 0) = std::sin(th);
  rot(1, 1) = std::cos(th);
  CHECK(operator_norm_2x2(0.42 * rot) == Catch::Approx(0.42).margin(1e-14));
}
