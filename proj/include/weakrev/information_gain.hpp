#pragma once

// Information gained from the detector record, quantified as the estimation
// fidelity G_avg = Haar average of <psi|rho_G|psi> for the guessed state
// rho_G, and the erasure property of a successful reversal.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "weakrev/qubit.hpp"
#include "weakrev/rng.hpp"
#include "weakrev/weak_measurement.hpp"

namespace weakrev {

// Strategy I (mixture): on click guess |1>; on no-click guess the mixture
// p|0><0| + (1-p)|1><1|. Strategy II (zero): on click guess |1>; on no-click
// guess |0> outright, the optimal choice (the eigenstate of M2 with the
// largest eigenvalue).
enum class GuessStrategy { mixture, zero };

inline const char* to_string(GuessStrategy s) {
  return s == GuessStrategy::mixture ? "I" : "II";
}

// Outcome-probability-weighted guessed state rho_G for one input state.
inline DensityMatrix guess_state(GuessStrategy strategy, const PureState& psi,
                                 CollapseStrength strength) {
  const double p = strength.value();
  const double p1 = click_probability(psi, strength);
  const double p2 = 1.0 - p1;
  Matrix2 m;
  if (strategy == GuessStrategy::mixture) {
    m(0, 0) = p2 * p;
    m(1, 1) = p1 + p2 * (1.0 - p);
  } else {
    m(0, 0) = p2;
    m(1, 1) = p1;
  }
  return DensityMatrix(m);
}

enum class EstimationMethod { analytic, monte_carlo };

struct EstimationResult {
  double g_avg = 0.0;
  double p = 0.0;
  EstimationMethod method = EstimationMethod::analytic;
  std::uint64_t n_samples = 0;  // Monte Carlo only
  double std_error = 0.0;       // Monte Carlo only
};

// Closed forms: G_I = (3 + p^2)/6, G_II = (3 + p)/6. Both run from 1/2
// (random guess, p=0) to 2/3 (projection measurement, p=1).
inline EstimationResult estimation_fidelity_analytic(GuessStrategy strategy,
                                                     CollapseStrength strength) {
  const double p = strength.value();
  const double g = strategy == GuessStrategy::mixture ? (3.0 + p * p) / 6.0
                                                      : (3.0 + p) / 6.0;
  return EstimationResult{g, p, EstimationMethod::analytic, 0, 0.0};
}

// Haar Monte Carlo average of <psi|rho_G|psi>; the brute-force oracle for
// the closed forms. std_error is the sample standard deviation over sqrt(n).
inline EstimationResult estimation_fidelity_mc(GuessStrategy strategy,
                                               CollapseStrength strength,
                                               std::uint64_t n_samples,
                                               std::uint64_t seed) {
  if (n_samples == 0)
    throw std::invalid_argument("estimation_fidelity_mc: n_samples must be >= 1");
  SplitMix64 rng(derive_stream(seed, 0));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    const PureState psi = haar_state(rng);
    const double g = fidelity_pure(psi, guess_state(strategy, psi, strength));
    sum += g;
    sum_sq += g * g;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double variance = std::max(sum_sq / n - mean * mean, 0.0);
  const double std_error = n_samples > 1 ? std::sqrt(variance / (n - 1.0)) : 0.0;
  return EstimationResult{mean, strength.value(), EstimationMethod::monte_carlo,
                          n_samples, std_error};
}

// The reversal as information erasure: the analytic joint success
// probability P2 * prob_rev equals 1-p for every input, so the success
// record carries no information. Returns the maximum absolute deviation
// from 1-p over the given states. Branch probabilities are formed as ratios
// of branch weights (no intermediate amplitude renormalization), so the
// cancellation is algebraic.
inline double erasure_check(CollapseStrength strength,
                            const std::vector<PureState>& states) {
  strength.require_reversible();
  if (states.empty())
    throw std::invalid_argument("erasure_check: no input states");
  const double p = strength.value();
  const double expected = 1.0 - p;
  double max_dev = 0.0;
  for (const PureState& psi : states) {
    const double s = std::norm(psi.alpha()) + std::norm(psi.beta());
    const double collapse_weight = std::norm(psi.alpha()) + (1.0 - p) * std::norm(psi.beta());
    const double p2 = collapse_weight / s;
    const double prob_rev = (1.0 - p) * s / collapse_weight;
    max_dev = std::max(max_dev, std::abs(p2 * prob_rev - expected));
  }
  return max_dev;
}

struct DominanceRow {
  double p;
  double g_strategy_i;
  double g_strategy_ii;
  double difference;  // G_II - G_I = (p - p^2)/6 >= 0
};

// Tabulate both strategies over a grid of p. Strategy II dominates
// everywhere, with equality only at the random-guess and projection
// endpoints.
inline std::vector<DominanceRow> strategy_dominance_scan(
    const std::vector<double>& p_grid) {
  std::vector<DominanceRow> rows;
  rows.reserve(p_grid.size());
  for (double p : p_grid) {
    const CollapseStrength strength(p);  // validates the grid
    const double g1 =
        estimation_fidelity_analytic(GuessStrategy::mixture, strength).g_avg;
    const double g2 =
        estimation_fidelity_analytic(GuessStrategy::zero, strength).g_avg;
    rows.push_back(DominanceRow{p, g1, g2, g2 - g1});
  }
  return rows;
}

}  // namespace weakrev
