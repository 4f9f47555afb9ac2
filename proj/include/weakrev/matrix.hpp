#pragma once

// Dense fixed-size complex matrices, sized for single-qubit work (2x2 states
// and operators, 4x4 process matrices). Everything is closed-form or small
// direct algebra; no external linear-algebra dependency.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace weakrev {

using cplx = std::complex<double>;

template <std::size_t N>
class Matrix {
 public:
  static_assert(N >= 1);

  Matrix() { entries_.fill(cplx{0.0, 0.0}); }

  static Matrix identity() {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(const std::array<cplx, N>& d) {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  cplx& operator()(std::size_t r, std::size_t c) { return entries_[r * N + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * N + c];
  }

  Matrix operator+(const Matrix& o) const {
    Matrix m;
    for (std::size_t i = 0; i < N * N; ++i) m.entries_[i] = entries_[i] + o.entries_[i];
    return m;
  }

  Matrix operator-(const Matrix& o) const {
    Matrix m;
    for (std::size_t i = 0; i < N * N; ++i) m.entries_[i] = entries_[i] - o.entries_[i];
    return m;
  }

  Matrix operator*(const Matrix& o) const {
    Matrix m;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t k = 0; k < N; ++k) {
        const cplx a = (*this)(r, k);
        if (a == cplx{0.0, 0.0}) continue;
        for (std::size_t c = 0; c < N; ++c) m(r, c) += a * o(k, c);
      }
    return m;
  }

  Matrix operator*(cplx s) const {
    Matrix m;
    for (std::size_t i = 0; i < N * N; ++i) m.entries_[i] = entries_[i] * s;
    return m;
  }

  friend Matrix operator*(cplx s, const Matrix& m) { return m * s; }

  std::array<cplx, N> operator*(const std::array<cplx, N>& v) const {
    std::array<cplx, N> out{};
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c) out[r] += (*this)(r, c) * v[c];
    return out;
  }

  Matrix adjoint() const {
    Matrix m;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c) m(r, c) = std::conj((*this)(c, r));
    return m;
  }

  Matrix transpose() const {
    Matrix m;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c) m(r, c) = (*this)(c, r);
    return m;
  }

  Matrix conjugate() const {
    Matrix m;
    for (std::size_t i = 0; i < N * N; ++i) m.entries_[i] = std::conj(entries_[i]);
    return m;
  }

  cplx trace() const {
    cplx t{0.0, 0.0};
    for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (const cplx& e : entries_) m = std::max(m, std::abs(e));
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const cplx& e : entries_) s += std::norm(e);
    return std::sqrt(s);
  }

  bool is_hermitian(double tol) const { return ((*this) - adjoint()).max_abs() <= tol; }

 private:
  std::array<cplx, N * N> entries_;  // row-major
};

using Matrix2 = Matrix<2>;
using Matrix4 = Matrix<4>;

template <std::size_t N>
double max_abs_diff(const Matrix<N>& a, const Matrix<N>& b) {
  return (a - b).max_abs();
}

// Hilbert-Schmidt inner product tr(A^dag B).
template <std::size_t N>
cplx hs_inner(const Matrix<N>& a, const Matrix<N>& b) {
  cplx s{0.0, 0.0};
  for (std::size_t r = 0; r < N; ++r)
    for (std::size_t c = 0; c < N; ++c) s += std::conj(a(r, c)) * b(r, c);
  return s;
}

// Eigenvalues of a 2x2 Hermitian matrix via the closed-form quadratic,
// returned ascending. Only the Hermitian part enters (diagonal real parts,
// the |off-diagonal| modulus).
inline std::array<double, 2> hermitian_eigenvalues_2x2(const Matrix2& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double r = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m(0, 1)));
  const double mean = 0.5 * (a + d);
  return {mean - r, mean + r};
}

// Largest singular value, i.e. the operator norm.
inline double operator_norm_2x2(const Matrix2& m) {
  const Matrix2 gram = m.adjoint() * m;
  return std::sqrt(std::max(0.0, hermitian_eigenvalues_2x2(gram)[1]));
}

template <std::size_t N>
struct HermitianEigen {
  std::array<double, N> values;  // ascending
  Matrix<N> vectors;             // columns, matching `values`
};

// Cyclic Jacobi diagonalization for Hermitian matrices. Deterministic and
// more than accurate enough at these sizes; converges in a handful of sweeps.
template <std::size_t N>
HermitianEigen<N> hermitian_eigensystem(Matrix<N> a) {
  Matrix<N> v = Matrix<N>::identity();
  constexpr int kMaxSweeps = 60;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) off += std::norm(a(p, q));
    if (off < 1e-30) break;

    for (std::size_t p = 0; p < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const cplx apq = a(p, q);
        const double r = std::abs(apq);
        if (r < 1e-300) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = 0.5 * std::atan2(2.0 * r, app - aqq);
        const double c = std::cos(theta);
        const cplx phase = apq / r;  // e^{i arg apq}
        const cplx s = std::sin(theta) * phase;

        // A <- G^dag A G with the plane rotation G acting on columns p,q:
        //   G[p][p]=c, G[p][q]=-s, G[q][p]=conj(s), G[q][q]=c.
        for (std::size_t k = 0; k < N; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = c * akp + std::conj(s) * akq;
          a(k, q) = -s * akp + c * akq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = c * apk + s * aqk;
          a(q, k) = -std::conj(s) * apk + c * aqk;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = c * vkp + std::conj(s) * vkq;
          v(k, q) = -s * vkp + c * vkq;
        }
      }
    }
  }

  HermitianEigen<N> out;
  std::array<std::size_t, N> order;
  for (std::size_t i = 0; i < N; ++i) order[i] = i;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j)
      if (a(order[j], order[j]).real() < a(order[i], order[i]).real())
        std::swap(order[i], order[j]);
  for (std::size_t i = 0; i < N; ++i) {
    out.values[i] = a(order[i], order[i]).real();
    for (std::size_t k = 0; k < N; ++k) out.vectors(k, i) = v(k, order[i]);
  }
  return out;
}

// Solve A x = b by Gaussian elimination with partial pivoting.
template <std::size_t N>
std::array<cplx, N> solve_linear(Matrix<N> a, std::array<cplx, N> b,
                                 double singular_tol = 1e-12) {
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) < singular_tol)
      throw std::invalid_argument("solve_linear: singular system (column " +
                                  std::to_string(col) + ")");
    if (pivot != col) {
      for (std::size_t c = 0; c < N; ++c) std::swap(a(col, c), a(pivot, c));
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < N; ++r) {
      const cplx f = a(r, col) / a(col, col);
      if (f == cplx{0.0, 0.0}) continue;
      for (std::size_t c = col; c < N; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  std::array<cplx, N> x{};
  for (std::size_t i = N; i-- > 0;) {
    cplx s = b[i];
    for (std::size_t c = i + 1; c < N; ++c) s -= a(i, c) * x[c];
    x[i] = s / a(i, i);
  }
  return x;
}

// Column-major vectorization: vec(M)[c*2+r] = M(r,c).
inline std::array<cplx, 4> vec(const Matrix2& m) {
  return {m(0, 0), m(1, 0), m(0, 1), m(1, 1)};
}

inline Matrix2 unvec(const std::array<cplx, 4>& v) {
  Matrix2 m;
  m(0, 0) = v[0];
  m(1, 0) = v[1];
  m(0, 1) = v[2];
  m(1, 1) = v[3];
  return m;
}

// Kronecker product indexed to match the column-major vec convention:
// vec(A X B) = kron(B^T, A) vec(X).
inline Matrix4 kron(const Matrix2& m, const Matrix2& n) {
  Matrix4 out;
  for (std::size_t cp = 0; cp < 2; ++cp)
    for (std::size_t rp = 0; rp < 2; ++rp)
      for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t r = 0; r < 2; ++r)
          out(cp * 2 + rp, c * 2 + r) = m(cp, c) * n(rp, r);
  return out;
}

}  // namespace weakrev
