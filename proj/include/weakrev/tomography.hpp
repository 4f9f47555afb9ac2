#pragma once

// Quantum state and process tomography for one qubit: a forward model that
// simulates projective measurement counts, Stokes linear inversion, a
// maximum-likelihood reconstructor over the Cholesky-parametrized physical
// set, and chi-matrix process reconstruction in the Pauli basis (I, X, Y, Z).

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "weakrev/errors.hpp"
#include "weakrev/matrix.hpp"
#include "weakrev/nelder_mead.hpp"
#include "weakrev/qubit.hpp"
#include "weakrev/rng.hpp"

namespace weakrev {

// One projective measurement setting: a cardinal label plus its rank-1
// projector.
struct MeasurementSetting {
  StateLabel label;
  DensityMatrix projector;
};

inline MeasurementSetting setting_for(StateLabel label) {
  return MeasurementSetting{label, DensityMatrix::from_pure(named_state(label))};
}

// The overcomplete six-setting scheme, fixed order H, V, D, A, R, L.
inline std::vector<MeasurementSetting> standard_settings() {
  return {setting_for(StateLabel::H), setting_for(StateLabel::V),
          setting_for(StateLabel::D), setting_for(StateLabel::A),
          setting_for(StateLabel::R), setting_for(StateLabel::L)};
}

struct CountRecord {
  MeasurementSetting setting;
  std::uint64_t count = 0;
  std::uint64_t shots_nominal = 0;
};

// Imperfection knobs for the simulated experiment. Per-setting Poisson
// counting noise, Gaussian jitter of the measurement projector axis (degrees
// on the Bloch sphere), and an additive offset of the reversal-stage
// collapse strength.
struct NoiseModel {
  std::uint64_t shots_per_setting = 10000;
  double waveplate_jitter_deg = 0.0;
  double p_mismatch = 0.0;
  bool enable_poisson = false;

  static NoiseModel off() { return NoiseModel{}; }

  // Experiment-scale imperfections yielding >94% recovery and process
  // fidelities; an emulation, not a calibrated error budget.
  static NoiseModel paper_like() {
    return NoiseModel{10000, 0.6, 0.01, true};
  }
};

namespace detail {

inline BlochVector jitter_axis(const BlochVector& n, double sigma_rad,
                               SplitMix64& rng) {
  // Tangent frame at n.
  const double nn = n.norm();
  const BlochVector u{n.x / nn, n.y / nn, n.z / nn};
  BlochVector ref = std::abs(u.z) < 0.9 ? BlochVector{0.0, 0.0, 1.0}
                                        : BlochVector{1.0, 0.0, 0.0};
  BlochVector t1{u.y * ref.z - u.z * ref.y, u.z * ref.x - u.x * ref.z,
                 u.x * ref.y - u.y * ref.x};
  const double t1n = t1.norm();
  t1 = {t1.x / t1n, t1.y / t1n, t1.z / t1n};
  const BlochVector t2{u.y * t1.z - u.z * t1.y, u.z * t1.x - u.x * t1.z,
                       u.x * t1.y - u.y * t1.x};
  const auto [e1, e2] = rng.next_gaussian_pair();
  BlochVector tilted{u.x + sigma_rad * (e1 * t1.x + e2 * t2.x),
                     u.y + sigma_rad * (e1 * t1.y + e2 * t2.y),
                     u.z + sigma_rad * (e1 * t1.z + e2 * t2.z)};
  const double tn = tilted.norm();
  return BlochVector{tilted.x / tn, tilted.y / tn, tilted.z / tn};
}

}  // namespace detail

// Forward model: expected count per setting is shots * tr(P rho), with the
// projector tilted by jitter before the Born rule and the count Poisson
// fluctuated when enabled. Deterministic given the RNG stream.
inline std::vector<CountRecord> simulate_counts(
    const DensityMatrix& rho, const std::vector<MeasurementSetting>& settings,
    const NoiseModel& noise, SplitMix64& rng) {
  if (settings.empty())
    throw std::invalid_argument("simulate_counts: no measurement settings");
  if (noise.shots_per_setting == 0)
    throw std::invalid_argument("simulate_counts: shots_per_setting must be positive");
  if (noise.waveplate_jitter_deg < 0.0)
    throw std::invalid_argument("simulate_counts: negative jitter");

  std::vector<CountRecord> records;
  records.reserve(settings.size());
  const double sigma_rad = noise.waveplate_jitter_deg * 3.14159265358979323846 / 180.0;
  for (const MeasurementSetting& s : settings) {
    DensityMatrix projector = s.projector;
    if (sigma_rad > 0.0) {
      projector = density_from_bloch(
          detail::jitter_axis(bloch_from(s.projector), sigma_rad, rng));
    }
    double prob = (projector.matrix() * rho.matrix()).trace().real();
    prob = std::min(1.0, std::max(0.0, prob));
    const double expected = prob * static_cast<double>(noise.shots_per_setting);
    const std::uint64_t count =
        noise.enable_poisson ? rng.next_poisson(expected)
                             : static_cast<std::uint64_t>(std::llround(expected));
    records.push_back(CountRecord{s, count, noise.shots_per_setting});
  }
  return records;
}

inline std::vector<CountRecord> simulate_counts(
    const DensityMatrix& rho, const std::vector<MeasurementSetting>& settings,
    const NoiseModel& noise, std::uint64_t seed) {
  SplitMix64 rng(derive_stream(seed, 0));
  return simulate_counts(rho, settings, noise, rng);
}

namespace detail {

struct LabelSums {
  std::array<double, 6> counts{};  // indexed by StateLabel order H,V,D,A,R,L

  double& operator[](StateLabel l) { return counts[static_cast<std::size_t>(l)]; }
  double operator[](StateLabel l) const {
    return counts[static_cast<std::size_t>(l)];
  }
};

inline LabelSums sum_by_label(const std::vector<CountRecord>& records) {
  LabelSums sums;
  for (const CountRecord& r : records)
    sums[r.setting.label] += static_cast<double>(r.count);
  return sums;
}

}  // namespace detail

// Stokes reconstruction rho = (1 + Sx X + Sy Y + Sz Z)/2 from the six-setting
// counts. Hermitian and unit-trace by construction; not necessarily positive
// under noise. With |0>=|H> at +z: Sz from H/V, Sx from D/A, Sy from L/R
// (L = (|H>+i|V>)/sqrt2 is the +y eigenstate).
inline Matrix2 linear_inversion(const std::vector<CountRecord>& records) {
  const detail::LabelSums n = detail::sum_by_label(records);
  auto stokes = [&](StateLabel plus, StateLabel minus) {
    const double total = n[plus] + n[minus];
    if (total <= 0.0)
      throw insufficient_data_error(std::string("linear_inversion: no counts in the ") +
                                    to_string(plus) + "/" + to_string(minus) + " pair");
    return (n[plus] - n[minus]) / total;
  };
  const double sz = stokes(StateLabel::H, StateLabel::V);
  const double sx = stokes(StateLabel::D, StateLabel::A);
  const double sy = stokes(StateLabel::L, StateLabel::R);
  return 0.5 * (pauli_i() + sx * pauli_x() + sy * pauli_y() + sz * pauli_z());
}

// Nearest positive-semidefinite unit-trace matrix: eigenvalue clipping at
// zero followed by trace renormalization. Idempotent.
template <std::size_t N>
Matrix<N> project_to_physical(const Matrix<N>& hermitian_raw) {
  const Matrix<N> sym = 0.5 * (hermitian_raw + hermitian_raw.adjoint());
  const HermitianEigen<N> eig = hermitian_eigensystem(sym);
  std::array<double, N> clipped{};
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    clipped[i] = std::max(eig.values[i], 0.0);
    total += clipped[i];
  }
  if (total <= 1e-15)
    throw degenerate_input_error(
        "project_to_physical: no positive spectral weight");
  Matrix<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    if (clipped[i] == 0.0) continue;
    const double w = clipped[i] / total;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c)
        out(r, c) += w * eig.vectors(r, i) * std::conj(eig.vectors(c, i));
  }
  return 0.5 * (out + out.adjoint());
}

namespace detail {

// rho(t) = T^dag T / tr(T^dag T) with lower-triangular
// T = [[t0, 0], [t2 + i t3, t1]]; physical for every parameter value.
inline Matrix2 rho_from_cholesky_params(const std::vector<double>& t) {
  const double a = t[0];
  const double c = t[1];
  const cplx b{t[2], t[3]};
  Matrix2 m;
  m(0, 0) = a * a + std::norm(b);
  m(0, 1) = std::conj(b) * c;
  m(1, 0) = b * c;
  m(1, 1) = c * c;
  const double tr = m.trace().real();
  if (tr <= 1e-300) {
    Matrix2 mixed;
    mixed(0, 0) = 0.5;
    mixed(1, 1) = 0.5;
    return mixed;
  }
  return m * cplx{1.0 / tr, 0.0};
}

inline std::vector<double> cholesky_params_from_rho(const Matrix2& rho) {
  const double r00 = std::max(rho(0, 0).real(), 1e-12);
  const double a = std::sqrt(r00);
  const cplx b = rho(1, 0) / a;
  const double c = std::sqrt(std::max(rho(1, 1).real() - std::norm(b), 0.0));
  return {a, c, b.real(), b.imag()};
}

// Poisson log-likelihood of the counts, up to the n-only constant.
inline double poisson_log_likelihood(const std::vector<CountRecord>& records,
                                     const Matrix2& rho) {
  double ll = 0.0;
  for (const CountRecord& r : records) {
    double prob = (r.setting.projector.matrix() * rho).trace().real();
    prob = std::min(1.0, std::max(prob, 1e-12));
    const double mu = prob * static_cast<double>(r.shots_nominal);
    ll += static_cast<double>(r.count) * std::log(mu) - mu;
  }
  return ll;
}

}  // namespace detail

// Maximum-likelihood state reconstruction: maximizes the per-setting Poisson
// likelihood over the physical set, seeded from the physicality-projected
// linear inversion. The returned estimate never has lower log-likelihood
// than that seed.
inline DensityMatrix mle_state(const std::vector<CountRecord>& records,
                               const NelderMeadOptions& opts = {}) {
  const Matrix2 projected = project_to_physical<2>(linear_inversion(records));
  const std::vector<double> start = detail::cholesky_params_from_rho(projected);

  auto objective = [&records](const std::vector<double>& t) {
    return -detail::poisson_log_likelihood(records,
                                           detail::rho_from_cholesky_params(t));
  };
  const NelderMeadResult fit = nelder_mead(objective, start, opts);
  if (!fit.converged) {
    const Matrix2 best = detail::rho_from_cholesky_params(fit.point);
    throw convergence_error(
        "mle_state: no convergence within " + std::to_string(opts.max_evaluations) +
            " evaluations",
        {best(0, 0), best(0, 1), best(1, 0), best(1, 1)});
  }

  const Matrix2 estimate = detail::rho_from_cholesky_params(fit.point);
  if (detail::poisson_log_likelihood(records, estimate) <
      detail::poisson_log_likelihood(records, projected)) {
    return DensityMatrix(projected);
  }
  return DensityMatrix(estimate);
}

// Process matrix in the Pauli basis: E(rho) = sum_mn chi_mn s_m rho s_n^dag.
// Hermitian, positive-semidefinite, unit trace (the trace-preserving
// convention after post-selection renormalization).
class ChiMatrix {
 public:
  explicit ChiMatrix(const Matrix4& entries) : entries_(entries) {
    if (!entries_.is_hermitian(kPhysicalTol))
      throw std::invalid_argument("ChiMatrix: not Hermitian");
    if (std::abs(entries_.trace() - cplx{1.0, 0.0}) > 1e-8)
      throw std::invalid_argument("ChiMatrix: trace != 1");
    if (hermitian_eigensystem(entries_).values[0] < -kPhysicalTol)
      throw std::invalid_argument("ChiMatrix: negative eigenvalue");
  }

  // chi of the ideal identity channel: peaked at (I, I) only.
  static ChiMatrix ideal_identity() {
    Matrix4 m;
    m(0, 0) = 1.0;
    return ChiMatrix(m);
  }

  const Matrix4& matrix() const { return entries_; }
  cplx operator()(std::size_t r, std::size_t c) const { return entries_(r, c); }

  // Apply the channel this chi represents (unnormalized).
  Matrix2 apply(const Matrix2& rho) const {
    const auto& sigma = pauli_basis();
    Matrix2 out;
    for (std::size_t m = 0; m < 4; ++m)
      for (std::size_t n = 0; n < 4; ++n) {
        const cplx w = entries_(m, n);
        if (w == cplx{0.0, 0.0}) continue;
        out = out + w * (sigma[m] * rho * sigma[n].adjoint());
      }
    return out;
  }

 private:
  Matrix4 entries_;
};

// Reconstruct chi from four probe states and the reconstructed channel
// outputs. The probes must span the 2x2 matrix space (the default probe set
// H, V, A, L does). Linear inversion through the superoperator, then
// physicality projection.
inline ChiMatrix qpt_chi(const std::array<PureState, 4>& probes,
                         const std::array<DensityMatrix, 4>& outputs) {
  // Columns of B are the vectorized probe inputs.
  Matrix4 b;
  for (std::size_t j = 0; j < 4; ++j) {
    const auto v = vec(DensityMatrix::from_pure(probes[j]).matrix());
    for (std::size_t i = 0; i < 4; ++i) b(i, j) = v[i];
  }
  const HermitianEigen<4> gram = hermitian_eigensystem(b.adjoint() * b);
  if (gram.values[0] < 1e-6)
    throw std::invalid_argument("qpt_chi: probe states are linearly dependent");

  // Superoperator S: column vec(E(E_ab)) for each elementary input E_ab,
  // with E extended off the probes by linearity.
  Matrix4 s;
  for (std::size_t col = 0; col < 4; ++col) {
    std::array<cplx, 4> rhs{};
    rhs[col] = 1.0;
    const std::array<cplx, 4> coeff = solve_linear(b, rhs);
    Matrix2 image;
    for (std::size_t j = 0; j < 4; ++j)
      image = image + coeff[j] * outputs[j].matrix();
    const auto v = vec(image);
    for (std::size_t i = 0; i < 4; ++i) s(i, col) = v[i];
  }

  // chi_mn = tr(G_mn^dag S)/4 with G_mn = conj(s_n) (x) s_m matching the
  // column-major vec convention.
  const auto& sigma = pauli_basis();
  Matrix4 chi_raw;
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t n = 0; n < 4; ++n)
      chi_raw(m, n) = hs_inner(kron(sigma[n].conjugate(), sigma[m]), s) * 0.25;

  return ChiMatrix(project_to_physical<4>(chi_raw));
}

// Overlap fidelity F = Re tr(chi_exp chi_ideal); 1 for identical rank-1
// process matrices, symmetric in its arguments.
inline double process_fidelity(const ChiMatrix& chi_exp, const ChiMatrix& chi_ideal) {
  return (chi_exp.matrix() * chi_ideal.matrix()).trace().real();
}

}  // namespace weakrev
