#pragma once

// Partial-collapse measurement and its probabilistic reversal.
//
// The measurement has two branches: a detector click (operator
// M1 = sqrt(p)|1><1|, irreversible) and a null outcome (operator
// M2 = diag(1, sqrt(1-p)), the weak measurement proper). Reversal applies
// M2rev = X M2 X = diag(sqrt(1-p), 1): bit-flip, the same weak measurement,
// bit-flip. The unnormalized inverse M2^{-1} = M2rev / sqrt(1-p) is never
// materialized; only the physical contraction M2rev and the scalar appear.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "weakrev/qubit.hpp"
#include "weakrev/rng.hpp"

namespace weakrev {

// Partial-collapse strength: the probability that the detector clicks given
// the qubit is in |1>. p=0 is no measurement, p=1 a projection.
class CollapseStrength {
 public:
  explicit CollapseStrength(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("CollapseStrength: p = " + std::to_string(p) +
                                  " outside [0, 1]");
  }

  double value() const { return p_; }

  // Operations that must invert M2 additionally need p < 1.
  void require_reversible() const {
    if (p_ >= 1.0)
      throw std::invalid_argument(
          "CollapseStrength: p = 1 has no reversal (projection measurement)");
  }

 private:
  double p_;
};

struct WeakOps {
  MeasurementOperator click;     // M1
  MeasurementOperator no_click;  // M2
};

// The two measurement operators of the partial-collapse measurement.
// Completeness M1^dag M1 + M2^dag M2 = 1 holds by construction.
inline WeakOps weak_ops(CollapseStrength strength) {
  const double p = strength.value();
  Matrix2 m1;
  m1(1, 1) = std::sqrt(p);
  Matrix2 m2;
  m2(0, 0) = 1.0;
  m2(1, 1) = std::sqrt(1.0 - p);
  return WeakOps{MeasurementOperator(m1, OutcomeTag::click),
                 MeasurementOperator(m2, OutcomeTag::no_click)};
}

struct CollapseResult {
  PureState state;              // |psi_m>
  double no_click_probability;  // P2
};

// Null-outcome branch in closed form:
//   alpha' = alpha / sqrt(1 - |beta|^2 p)
//   beta'  = beta sqrt(1-p) / sqrt(1 - |beta|^2 p)
// with P2 = |alpha|^2 + (1-p)|beta|^2.
inline CollapseResult partial_collapse(const PureState& psi,
                                       CollapseStrength strength) {
  const double p = strength.value();
  const double beta2 = std::norm(psi.beta());
  const double p2 = std::norm(psi.alpha()) + (1.0 - p) * beta2;
  if (p2 <= kZeroBranchTol)
    throw impossible_branch_error("partial_collapse: null outcome has probability " +
                                  std::to_string(p2));
  const double denom = std::sqrt(1.0 - beta2 * p);
  return CollapseResult{
      PureState(psi.alpha() / denom, psi.beta() * std::sqrt(1.0 - p) / denom), p2};
}

// Click branch: probability P1 = p |beta|^2, post-state |1>.
inline double click_probability(const PureState& psi, CollapseStrength strength) {
  return strength.value() * std::norm(psi.beta());
}

// M2rev = diag(sqrt(1-p), 1), the physical reversing contraction.
inline MeasurementOperator reversal_op(CollapseStrength strength) {
  strength.require_reversible();
  Matrix2 m;
  m(0, 0) = std::sqrt(1.0 - strength.value());
  m(1, 1) = 1.0;
  return MeasurementOperator(m, OutcomeTag::no_click);
}

// The same operator built the way the optics builds it: bit-flip, weak
// measurement M2, bit-flip. Kept alongside the closed form so tests can pin
// their equality.
inline MeasurementOperator reversal_op_via_flips(CollapseStrength strength) {
  strength.require_reversible();
  const Matrix2 composed =
      pauli_x() * weak_ops(strength).no_click.matrix() * pauli_x();
  return MeasurementOperator(composed, OutcomeTag::no_click);
}

struct ReversalResult {
  PureState state;
  double success_probability;  // of this reversal stage alone
};

// Apply the reversing operation to a (typically partially collapsed) state.
// Conditioned on its own null outcome it restores the pre-measurement state;
// jointly with the preceding partial collapse the success probability is
// 1-p independent of the input.
inline ReversalResult reverse(const PureState& psi_m, CollapseStrength strength) {
  strength.require_reversible();
  const double p = strength.value();
  const double prob = (1.0 - p) * std::norm(psi_m.alpha()) + std::norm(psi_m.beta());
  if (prob <= kZeroBranchTol)
    throw impossible_branch_error("reverse: null outcome has probability " +
                                  std::to_string(prob));
  const double denom = std::sqrt(prob);
  return ReversalResult{
      PureState(psi_m.alpha() * std::sqrt(1.0 - p) / denom, psi_m.beta() / denom),
      prob};
}

inline PureState bit_flip(const PureState& psi) {
  return PureState(psi.beta(), psi.alpha());
}

enum class Branch { click, no_click };

struct TrajectoryOutcome {
  Branch branch;
  PureState post_state;       // |1> on click, partial-collapse result otherwise
  double branch_probability;  // analytic probability of the sampled branch
};

// One stochastic run of the measurement. Pure function of (state, p, seed).
inline TrajectoryOutcome sample_trajectory(const PureState& psi,
                                           CollapseStrength strength,
                                           std::uint64_t seed) {
  SplitMix64 rng(derive_stream(seed, 0));
  const double p1 = click_probability(psi, strength);
  if (rng.next_double() < p1) {
    return TrajectoryOutcome{Branch::click, named_state(StateLabel::V), p1};
  }
  CollapseResult r = partial_collapse(psi, strength);
  return TrajectoryOutcome{Branch::no_click, r.state, r.no_click_probability};
}

enum class ReversalOutcome { reversed_ok, lost_at_measurement, lost_at_reversal };

inline const char* to_string(ReversalOutcome o) {
  switch (o) {
    case ReversalOutcome::reversed_ok: return "reversed_ok";
    case ReversalOutcome::lost_at_measurement: return "lost_at_measurement";
    case ReversalOutcome::lost_at_reversal: return "lost_at_reversal";
  }
  throw std::invalid_argument("unreachable reversal outcome");
}

struct ReversalTrajectory {
  ReversalOutcome outcome;
  std::optional<PureState> final_state;  // engaged on reversed_ok
};

// One stochastic run of measurement followed by reversal, sampled through
// the physical flip -> M2 -> flip sequence. Success frequency converges to
// 1-p for every input state.
inline ReversalTrajectory sample_reversal_trajectory(const PureState& psi,
                                                     CollapseStrength strength,
                                                     std::uint64_t seed) {
  strength.require_reversible();
  SplitMix64 rng(derive_stream(seed, 0));

  if (rng.next_double() < click_probability(psi, strength))
    return ReversalTrajectory{ReversalOutcome::lost_at_measurement, std::nullopt};
  const PureState measured = partial_collapse(psi, strength).state;

  const PureState flipped = bit_flip(measured);
  if (rng.next_double() < click_probability(flipped, strength))
    return ReversalTrajectory{ReversalOutcome::lost_at_reversal, std::nullopt};
  const PureState reversed_flipped = partial_collapse(flipped, strength).state;

  return ReversalTrajectory{ReversalOutcome::reversed_ok,
                            bit_flip(reversed_flipped)};
}

// Stack of Brewster-angle glass plates realizing the weak measurement: each
// plate reflects vertical polarization with intensity probability 1-T, so
// n plates give p = 1 - T^n and stacking more plates increases p. The
// per-plate transmittance is configurable (default 0.85, a placeholder
// spanning p in [0.4, 0.9] for 3-14 plates, not a measured value).
struct PlateStack {
  unsigned n_plates = 0;
  double per_plate_v_transmittance = 0.85;
};

inline CollapseStrength brewster_stack(const PlateStack& stack) {
  const double t = stack.per_plate_v_transmittance;
  if (!(t > 0.0 && t <= 1.0))
    throw std::invalid_argument("brewster_stack: transmittance outside (0, 1]");
  double p = 1.0 - std::pow(t, static_cast<double>(stack.n_plates));
  // T^n > 0 for any finite stack, so p stays strictly below 1 even when the
  // power underflows.
  if (p >= 1.0) p = std::nextafter(1.0, 0.0);
  return CollapseStrength(p);
}

}  // namespace weakrev
