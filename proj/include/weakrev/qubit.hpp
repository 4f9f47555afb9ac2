#pragma once

// Single polarization-qubit primitives: pure states, density matrices,
// measurement operators, Bloch-vector conversion and fidelity.
//
// Basis convention used throughout: |0> = |H>, |1> = |V>, Bloch +z = |H>.
// States are rays; equality of pure states is always up to global phase.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "weakrev/errors.hpp"
#include "weakrev/matrix.hpp"
#include "weakrev/rng.hpp"

namespace weakrev {

// Tolerance for physical-structure checks (Hermiticity, trace, positivity).
inline constexpr double kPhysicalTol = 1e-10;
// Tolerance for pure floating-point arithmetic identities.
inline constexpr double kArithmeticTol = 1e-12;
// Branch probabilities at or below this are treated as impossible.
inline constexpr double kZeroBranchTol = 1e-15;

inline const Matrix2& pauli_i() {
  static const Matrix2 m = Matrix2::identity();
  return m;
}

inline const Matrix2& pauli_x() {
  static const Matrix2 m = [] {
    Matrix2 x;
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    return x;
  }();
  return m;
}

inline const Matrix2& pauli_y() {
  static const Matrix2 m = [] {
    Matrix2 y;
    y(0, 1) = cplx{0.0, -1.0};
    y(1, 0) = cplx{0.0, 1.0};
    return y;
  }();
  return m;
}

inline const Matrix2& pauli_z() {
  static const Matrix2 m = [] {
    Matrix2 z;
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    return z;
  }();
  return m;
}

inline const std::array<Matrix2, 4>& pauli_basis() {
  static const std::array<Matrix2, 4> basis = {pauli_i(), pauli_x(), pauli_y(),
                                               pauli_z()};
  return basis;
}

// Normalized amplitude pair over {|H>, |V>}. Construction normalizes, so the
// unit-norm invariant holds afterwards by definition.
class PureState {
 public:
  PureState(cplx alpha, cplx beta) : alpha_(alpha), beta_(beta) {
    const double n = std::sqrt(std::norm(alpha_) + std::norm(beta_));
    if (n < 1e-150) throw std::invalid_argument("PureState: zero amplitude vector");
    alpha_ /= n;
    beta_ /= n;
  }

  cplx alpha() const { return alpha_; }
  cplx beta() const { return beta_; }

  cplx overlap(const PureState& other) const {
    return std::conj(alpha_) * other.alpha_ + std::conj(beta_) * other.beta_;
  }

  // Ray equality: |<other|this>| = 1 within tol.
  bool equals_up_to_phase(const PureState& other, double tol = kPhysicalTol) const {
    return std::abs(std::abs(overlap(other)) - 1.0) <= tol;
  }

 private:
  cplx alpha_;
  cplx beta_;
};

enum class StateLabel { H, V, D, A, R, L };

inline const char* to_string(StateLabel label) {
  switch (label) {
    case StateLabel::H: return "H";
    case StateLabel::V: return "V";
    case StateLabel::D: return "D";
    case StateLabel::A: return "A";
    case StateLabel::R: return "R";
    case StateLabel::L: return "L";
  }
  throw std::invalid_argument("unreachable state label");
}

inline StateLabel parse_state_label(const std::string& s) {
  if (s == "H") return StateLabel::H;
  if (s == "V") return StateLabel::V;
  if (s == "D") return StateLabel::D;
  if (s == "A") return StateLabel::A;
  if (s == "R") return StateLabel::R;
  if (s == "L") return StateLabel::L;
  throw std::invalid_argument("unknown state label: '" + s + "'");
}

// The six cardinal polarization states. H/V are the computational basis,
// D/A the diagonal pair, R/L the circular pair with L = (|H> + i|V>)/sqrt2.
inline PureState named_state(StateLabel label) {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  switch (label) {
    case StateLabel::H: return PureState(1.0, 0.0);
    case StateLabel::V: return PureState(0.0, 1.0);
    case StateLabel::D: return PureState(inv_sqrt2, inv_sqrt2);
    case StateLabel::A: return PureState(inv_sqrt2, -inv_sqrt2);
    case StateLabel::R: return PureState(inv_sqrt2, cplx{0.0, -inv_sqrt2});
    case StateLabel::L: return PureState(inv_sqrt2, cplx{0.0, inv_sqrt2});
  }
  throw std::invalid_argument("unreachable state label");
}

inline PureState named_state(const std::string& label) {
  return named_state(parse_state_label(label));
}

// 2x2 Hermitian, unit-trace, positive-semidefinite matrix. The constructor
// enforces all three invariants.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Matrix2& entries) : entries_(entries) {
    if (!entries_.is_hermitian(kPhysicalTol))
      throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(entries_.trace() - cplx{1.0, 0.0}) > kPhysicalTol)
      throw std::invalid_argument("DensityMatrix: trace != 1");
    if (hermitian_eigenvalues_2x2(entries_)[0] < -kPhysicalTol)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue");
  }

  static DensityMatrix from_pure(const PureState& psi) {
    Matrix2 m;
    m(0, 0) = std::norm(psi.alpha());
    m(0, 1) = psi.alpha() * std::conj(psi.beta());
    m(1, 0) = std::conj(m(0, 1));
    m(1, 1) = std::norm(psi.beta());
    return DensityMatrix(m);
  }

  static DensityMatrix maximally_mixed() {
    Matrix2 m;
    m(0, 0) = 0.5;
    m(1, 1) = 0.5;
    return DensityMatrix(m);
  }

  const Matrix2& matrix() const { return entries_; }
  cplx operator()(std::size_t r, std::size_t c) const { return entries_(r, c); }

  double min_eigenvalue() const { return hermitian_eigenvalues_2x2(entries_)[0]; }

 private:
  Matrix2 entries_;
};

enum class OutcomeTag { click, no_click, plumbing };

// A single outcome branch of a generalized measurement: any 2x2 contraction
// (operator norm <= 1).
class MeasurementOperator {
 public:
  MeasurementOperator(const Matrix2& entries, OutcomeTag tag)
      : entries_(entries), tag_(tag) {
    if (operator_norm_2x2(entries_) > 1.0 + kArithmeticTol)
      throw std::invalid_argument("MeasurementOperator: operator norm exceeds 1");
  }

  const Matrix2& matrix() const { return entries_; }
  OutcomeTag tag() const { return tag_; }

 private:
  Matrix2 entries_;
  OutcomeTag tag_;
};

inline MeasurementOperator projector_0() {
  Matrix2 m;
  m(0, 0) = 1.0;
  return MeasurementOperator(m, OutcomeTag::plumbing);
}

inline MeasurementOperator projector_1() {
  Matrix2 m;
  m(1, 1) = 1.0;
  return MeasurementOperator(m, OutcomeTag::plumbing);
}

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline BlochVector bloch_from(const DensityMatrix& rho) {
  const Matrix2& m = rho.matrix();
  return BlochVector{
      (m * pauli_x()).trace().real(),
      (m * pauli_y()).trace().real(),
      (m * pauli_z()).trace().real(),
  };
}

inline DensityMatrix density_from_bloch(const BlochVector& b) {
  if (b.norm() > 1.0 + kPhysicalTol)
    throw std::invalid_argument("density_from_bloch: vector outside unit ball");
  const Matrix2 m = 0.5 * (pauli_i() + b.x * pauli_x() + b.y * pauli_y() +
                           b.z * pauli_z());
  return DensityMatrix(m);
}

inline PureState pure_from_bloch(const BlochVector& b) {
  const double n = b.norm();
  if (std::abs(n - 1.0) > 1e-6)
    throw std::invalid_argument("pure_from_bloch: vector not on unit sphere");
  const double theta = std::acos(b.z / n);
  const double phi = std::atan2(b.y, b.x);
  return PureState(std::cos(0.5 * theta),
                   std::polar(std::sin(0.5 * theta), phi));
}

// <psi| rho |psi>, the pure-vs-mixed fidelity. Insensitive to the global
// phase of psi.
inline double fidelity_pure(const PureState& psi, const DensityMatrix& rho) {
  const std::array<cplx, 2> v = {psi.alpha(), psi.beta()};
  cplx acc{0.0, 0.0};
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) acc += std::conj(v[r]) * rho(r, c) * v[c];
  return acc.real();
}

struct BranchResult {
  DensityMatrix state;
  double probability;
};

// Outcome branch M rho M^dag with Born probability tr(M rho M^dag). Throws
// impossible_branch_error instead of normalizing a zero branch.
inline BranchResult apply_operator(const MeasurementOperator& op,
                                   const DensityMatrix& rho) {
  const Matrix2 raw = op.matrix() * rho.matrix() * op.matrix().adjoint();
  const double prob = raw.trace().real();
  if (prob <= kZeroBranchTol)
    throw impossible_branch_error("apply_operator: branch probability " +
                                  std::to_string(prob));
  // Symmetrize to remove rounding skew before the invariant check.
  const Matrix2 herm = 0.5 * (raw + raw.adjoint()) * cplx{1.0 / prob, 0.0};
  return BranchResult{DensityMatrix(herm), prob};
}

// Haar-uniform pure qubit state: normalize a pair of standard complex
// Gaussians.
inline PureState haar_state(SplitMix64& rng) {
  for (;;) {
    const auto [g1, g2] = rng.next_gaussian_pair();
    const auto [g3, g4] = rng.next_gaussian_pair();
    const cplx a{g1, g2};
    const cplx b{g3, g4};
    if (std::norm(a) + std::norm(b) > 1e-12) return PureState(a, b);
  }
}

}  // namespace weakrev
