#pragma once

// Desk-scale reproductions of the three experiments: state collapse and
// recovery across a set of input states (fig2), process tomography of the
// combined measurement+reversal channel (fig3), and estimation fidelity for
// the two guessing strategies (fig4). Cells are independent, derive their
// RNG streams from (seed, cell index), run concurrently, and merge in fixed
// order, so every output is a pure function of (config, seed).

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "weakrev/errors.hpp"
#include "weakrev/information_gain.hpp"
#include "weakrev/io.hpp"
#include "weakrev/qubit.hpp"
#include "weakrev/tomography.hpp"
#include "weakrev/weak_measurement.hpp"

namespace weakrev {

struct StateSpec {
  std::string label;
  PureState state;
};

// The 14 default inputs: the six cardinal states plus the eight cube-vertex
// states (+-1, +-1, +-1)/sqrt3 on the Bloch sphere, labeled by their octant
// sign pattern. Chosen for even sphere coverage; override per config.
inline std::vector<StateSpec> default_input_states() {
  std::vector<StateSpec> states;
  for (StateLabel l : {StateLabel::H, StateLabel::V, StateLabel::D, StateLabel::A,
                       StateLabel::R, StateLabel::L})
    states.push_back(StateSpec{to_string(l), named_state(l)});
  constexpr double s = 0.57735026918962576451;  // 1/sqrt3
  for (int sx : {+1, -1})
    for (int sy : {+1, -1})
      for (int sz : {+1, -1}) {
        std::string label = std::string(sx > 0 ? "+" : "-") + (sy > 0 ? "+" : "-") +
                            (sz > 0 ? "+" : "-");
        states.push_back(
            StateSpec{label, pure_from_bloch(BlochVector{sx * s, sy * s, sz * s})});
      }
  return states;
}

struct ExperimentConfig {
  // Collapse strengths for fig2/fig3 (reversal involved, so p < 1);
  // 0.895 matches the qpt subcommand's default anchor point.
  std::vector<double> p_grid = {0.0, 0.2, 0.4, 0.5, 0.6, 0.7, 0.8, 0.895, 0.95};
  // Grid for fig4/infogain, where p = 1 (projection) is a valid endpoint.
  std::vector<double> infogain_p_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                         0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<StateSpec> input_states = default_input_states();
  NoiseModel noise = NoiseModel::off();
  std::uint64_t seed = 12345;
  std::string output_dir = "out";
  std::uint64_t mc_samples = 1000000;
  double plate_transmittance = 0.85;

  void validate() const {
    if (input_states.empty()) throw config_error("config: input_states is empty");
    if (p_grid.empty()) throw config_error("config: p_grid is empty");
    for (double p : p_grid)
      if (!(p >= 0.0 && p < 1.0))
        throw config_error("config: p_grid value " + format_double(p) +
                           " outside [0, 1)");
    for (double p : infogain_p_grid)
      if (!(p >= 0.0 && p <= 1.0))
        throw config_error("config: infogain_p_grid value " + format_double(p) +
                           " outside [0, 1]");
    if (noise.shots_per_setting == 0)
      throw config_error("config: shots_per_setting must be positive");
    if (noise.waveplate_jitter_deg < 0.0)
      throw config_error("config: waveplate_jitter_deg must be nonnegative");
    if (mc_samples == 0) throw config_error("config: mc_samples must be positive");
    if (!(plate_transmittance > 0.0 && plate_transmittance <= 1.0))
      throw config_error("config: plate_transmittance outside (0, 1]");
  }
};

namespace detail {

inline PureState state_from_json(const nlohmann::json& j, std::string* label_out) {
  if (j.is_string()) {
    *label_out = j.get<std::string>();
    return named_state(parse_state_label(*label_out));
  }
  if (j.is_object()) {
    *label_out = j.value("label", std::string("custom"));
    if (j.contains("bloch")) {
      const auto v = j.at("bloch");
      if (!v.is_array() || v.size() != 3)
        throw config_error("config: state 'bloch' must be [x, y, z]");
      return pure_from_bloch(
          BlochVector{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()});
    }
    if (j.contains("amplitudes")) {
      const auto v = j.at("amplitudes");
      if (!v.is_array() || v.size() != 2 || !v[0].is_array() || v[0].size() != 2 ||
          !v[1].is_array() || v[1].size() != 2)
        throw config_error(
            "config: state 'amplitudes' must be [[re, im], [re, im]]");
      return PureState(cplx{v[0][0].get<double>(), v[0][1].get<double>()},
                       cplx{v[1][0].get<double>(), v[1][1].get<double>()});
    }
    throw config_error("config: state object needs 'bloch' or 'amplitudes'");
  }
  throw config_error("config: state spec must be a label string or an object");
}

}  // namespace detail

inline NoiseModel noise_from_preset(const std::string& preset) {
  if (preset == "off") return NoiseModel::off();
  if (preset == "paper-like") return NoiseModel::paper_like();
  throw config_error("config: unknown noise preset '" + preset + "'");
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("p_grid")) cfg.p_grid = j.at("p_grid").get<std::vector<double>>();
    if (j.contains("infogain_p_grid"))
      cfg.infogain_p_grid = j.at("infogain_p_grid").get<std::vector<double>>();
    if (j.contains("mc_samples"))
      cfg.mc_samples = j.at("mc_samples").get<std::uint64_t>();
    if (j.contains("plate_transmittance"))
      cfg.plate_transmittance = j.at("plate_transmittance").get<double>();
    // Alternative to p_grid: specify Brewster-plate counts and derive the
    // strengths from the per-plate transmittance, the way the experiment
    // dials p by stacking plates.
    if (j.contains("plate_grid")) {
      if (j.contains("p_grid"))
        throw config_error("config: give either p_grid or plate_grid, not both");
      cfg.p_grid.clear();
      for (unsigned n : j.at("plate_grid").get<std::vector<unsigned>>())
        cfg.p_grid.push_back(
            brewster_stack(PlateStack{n, cfg.plate_transmittance}).value());
    }
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      const std::string preset = n.value("preset", std::string("custom"));
      if (preset != "custom") {
        cfg.noise = noise_from_preset(preset);
      } else {
        cfg.noise = NoiseModel::off();
        cfg.noise.shots_per_setting = n.value("shots_per_setting", std::uint64_t{10000});
        cfg.noise.waveplate_jitter_deg = n.value("waveplate_jitter_deg", 0.0);
        cfg.noise.p_mismatch = n.value("p_mismatch", 0.0);
        cfg.noise.enable_poisson = n.value("poisson", false);
      }
    }
    if (j.contains("shots_per_setting"))
      cfg.noise.shots_per_setting = j.at("shots_per_setting").get<std::uint64_t>();
    if (j.contains("input_states")) {
      cfg.input_states.clear();
      for (const auto& spec : j.at("input_states")) {
        std::string label;
        const PureState state = detail::state_from_json(spec, &label);
        cfg.input_states.push_back(StateSpec{label, state});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config parse failure in " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

// Deterministic parallel map: worker count never affects results because
// each index does independent work on its own derived RNG stream.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t workers = std::min<std::size_t>(hw == 0 ? 1 : hw, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : failures)
    if (e) std::rethrow_exception(e);
}

namespace detail {
// Disjoint stream tags so the figures never share RNG draws.
inline constexpr std::uint64_t kFig2Tag = 0x66696732;  // "fig2"
inline constexpr std::uint64_t kFig3Tag = 0x66696733;
inline constexpr std::uint64_t kFig4Tag = 0x66696734;

inline std::uint64_t cell_seed(std::uint64_t master, std::uint64_t tag,
                               std::uint64_t cell) {
  return derive_stream(derive_stream(master, tag), cell);
}
}  // namespace detail

struct Fig2Row {
  std::string state_label;
  double p = 0.0;
  double fidelity_initial_vs_recovered = 0.0;
  BlochVector bloch_initial;
  BlochVector bloch_collapsed;
  BlochVector bloch_recovered;
  bool ok = false;
  std::string error;
};

// Collapse/recovery experiment: for every (state, p) cell, tomograph the
// initial, collapsed, and recovered states through the noise model and
// report Bloch vectors plus the recovery fidelity against the known input.
// A failed cell is reported in place, not thrown.
inline std::vector<Fig2Row> run_fig2(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<MeasurementSetting> settings = standard_settings();
  const std::size_t n_states = cfg.input_states.size();
  const std::size_t n_cells = n_states * cfg.p_grid.size();
  std::vector<Fig2Row> rows(n_cells);

  parallel_for(n_cells, [&](std::size_t cell) {
    const StateSpec& spec = cfg.input_states[cell / cfg.p_grid.size()];
    const double p = cfg.p_grid[cell % cfg.p_grid.size()];
    Fig2Row& row = rows[cell];
    row.state_label = spec.label;
    row.p = p;
    SplitMix64 rng(detail::cell_seed(cfg.seed, detail::kFig2Tag, cell));
    try {
      const CollapseStrength strength(p);
      const CollapseStrength reversal_strength(p + cfg.noise.p_mismatch);

      const DensityMatrix rho_initial =
          mle_state(simulate_counts(DensityMatrix::from_pure(spec.state), settings,
                                    cfg.noise, rng));
      const PureState collapsed = partial_collapse(spec.state, strength).state;
      const DensityMatrix rho_collapsed =
          mle_state(simulate_counts(DensityMatrix::from_pure(collapsed), settings,
                                    cfg.noise, rng));
      const PureState recovered = reverse(collapsed, reversal_strength).state;
      const DensityMatrix rho_recovered =
          mle_state(simulate_counts(DensityMatrix::from_pure(recovered), settings,
                                    cfg.noise, rng));

      row.bloch_initial = bloch_from(rho_initial);
      row.bloch_collapsed = bloch_from(rho_collapsed);
      row.bloch_recovered = bloch_from(rho_recovered);
      row.fidelity_initial_vs_recovered = fidelity_pure(spec.state, rho_recovered);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  });
  return rows;
}

struct Fig3Result {
  double p = 0.0;
  std::optional<ChiMatrix> chi;
  double fidelity = 0.0;
  bool ok = false;
  std::string error;
};

// Default tomographically complete probe set for process tomography.
inline std::array<PureState, 4> qpt_probes() {
  return {named_state(StateLabel::H), named_state(StateLabel::V),
          named_state(StateLabel::A), named_state(StateLabel::L)};
}

// Process tomography of the success-conditioned measurement+reversal chain
// at each grid p: push the four probes through, tomograph the outputs,
// reconstruct chi and score it against the ideal identity process.
inline std::vector<Fig3Result> run_fig3(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<MeasurementSetting> settings = standard_settings();
  const std::array<PureState, 4> probes = qpt_probes();
  std::vector<Fig3Result> results(cfg.p_grid.size());

  parallel_for(cfg.p_grid.size(), [&](std::size_t cell) {
    const double p = cfg.p_grid[cell];
    Fig3Result& res = results[cell];
    res.p = p;
    SplitMix64 rng(detail::cell_seed(cfg.seed, detail::kFig3Tag, cell));
    try {
      const CollapseStrength strength(p);
      const CollapseStrength reversal_strength(p + cfg.noise.p_mismatch);
      std::vector<DensityMatrix> outputs;
      outputs.reserve(4);
      for (const PureState& probe : probes) {
        const PureState through =
            reverse(partial_collapse(probe, strength).state, reversal_strength).state;
        outputs.push_back(mle_state(simulate_counts(
            DensityMatrix::from_pure(through), settings, cfg.noise, rng)));
      }
      res.chi = qpt_chi(probes, {outputs[0], outputs[1], outputs[2], outputs[3]});
      res.fidelity = process_fidelity(*res.chi, ChiMatrix::ideal_identity());
      res.ok = true;
    } catch (const std::exception& e) {
      res.ok = false;
      res.error = e.what();
    }
  });
  return results;
}

struct Fig4Row {
  double p = 0.0;
  double g1_analytic = 0.0;
  double g2_analytic = 0.0;
  double g1_mc = 0.0;
  double g1_stderr = 0.0;
  double g2_mc = 0.0;
  double g2_stderr = 0.0;
};

// Estimation fidelity for both guessing strategies: analytic curves plus
// Haar Monte Carlo points with standard errors.
inline std::vector<Fig4Row> run_fig4(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Fig4Row> rows(cfg.infogain_p_grid.size());
  parallel_for(rows.size(), [&](std::size_t cell) {
    const double p = cfg.infogain_p_grid[cell];
    const CollapseStrength strength(p);
    Fig4Row& row = rows[cell];
    row.p = p;
    row.g1_analytic =
        estimation_fidelity_analytic(GuessStrategy::mixture, strength).g_avg;
    row.g2_analytic =
        estimation_fidelity_analytic(GuessStrategy::zero, strength).g_avg;
    const EstimationResult mc1 = estimation_fidelity_mc(
        GuessStrategy::mixture, strength, cfg.mc_samples,
        detail::cell_seed(cfg.seed, detail::kFig4Tag, cell * 2));
    const EstimationResult mc2 = estimation_fidelity_mc(
        GuessStrategy::zero, strength, cfg.mc_samples,
        detail::cell_seed(cfg.seed, detail::kFig4Tag, cell * 2 + 1));
    row.g1_mc = mc1.g_avg;
    row.g1_stderr = mc1.std_error;
    row.g2_mc = mc2.g_avg;
    row.g2_stderr = mc2.std_error;
  });
  return rows;
}

inline std::string bloch_cells(const BlochVector& b) {
  return format_double(b.x) + "," + format_double(b.y) + "," + format_double(b.z);
}

inline void write_fig2_csv(const std::filesystem::path& path,
                           const std::vector<Fig2Row>& rows) {
  CsvWriter csv(path, "fig2/v1",
                {"state", "p", "fidelity", "bx_initial", "by_initial", "bz_initial",
                 "bx_collapsed", "by_collapsed", "bz_collapsed", "bx_recovered",
                 "by_recovered", "bz_recovered", "status"});
  for (const Fig2Row& r : rows) {
    std::string status = "ok";
    if (!r.ok) {
      status = "failed:" + r.error;
      for (char& c : status)
        if (c == ',' || c == '\n') c = ';';
    }
    csv.write_row({r.state_label, format_double(r.p),
                   format_double(r.fidelity_initial_vs_recovered),
                   format_double(r.bloch_initial.x), format_double(r.bloch_initial.y),
                   format_double(r.bloch_initial.z), format_double(r.bloch_collapsed.x),
                   format_double(r.bloch_collapsed.y), format_double(r.bloch_collapsed.z),
                   format_double(r.bloch_recovered.x), format_double(r.bloch_recovered.y),
                   format_double(r.bloch_recovered.z), status});
  }
}

inline void write_fig3_outputs(const std::filesystem::path& dir,
                               const std::vector<Fig3Result>& results) {
  CsvWriter csv(dir / "fig3_fidelity.csv", "fig3/v1",
                {"p", "process_fidelity", "status"});
  for (const Fig3Result& r : results) {
    std::string status = "ok";
    if (!r.ok) {
      status = "failed:" + r.error;
      for (char& c : status)
        if (c == ',' || c == '\n') c = ';';
    }
    csv.write_row({format_double(r.p), format_double(r.fidelity), status});
    if (r.chi) {
      nlohmann::json j;
      j["p"] = r.p;
      j["chi"] = matrix_to_json(r.chi->matrix());
      j["process_fidelity"] = r.fidelity;
      write_json_file(dir / ("fig3_chi_p" + format_double(r.p) + ".json"), j);
    }
  }
}

inline void write_fig4_csv(const std::filesystem::path& path,
                           const std::vector<Fig4Row>& rows) {
  CsvWriter csv(path, "fig4/v1",
                {"p", "g1_analytic", "g2_analytic", "g1_mc", "g1_stderr", "g2_mc",
                 "g2_stderr"});
  for (const Fig4Row& r : rows) {
    csv.write_row({format_double(r.p), format_double(r.g1_analytic),
                   format_double(r.g2_analytic), format_double(r.g1_mc),
                   format_double(r.g1_stderr), format_double(r.g2_mc),
                   format_double(r.g2_stderr)});
  }
}

inline void write_infogain_csv(const std::filesystem::path& path,
                               const std::vector<DominanceRow>& rows) {
  CsvWriter csv(path, "infogain/v1",
                {"p", "g_strategy_I", "g_strategy_II", "difference"});
  for (const DominanceRow& r : rows) {
    csv.write_row({format_double(r.p), format_double(r.g_strategy_i),
                   format_double(r.g_strategy_ii), format_double(r.difference)});
  }
}

}  // namespace weakrev
