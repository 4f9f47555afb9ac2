// Command-line harness: seeded, reproducible runs of the collapse/recovery,
// process-tomography, and information-gain experiments, plus small
// single-shot utilities (trajectory sampling, one-state QST, one-point QPT).
//
// Exit codes: 0 success, 1 configuration/usage error, 2 runtime error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "weakrev/experiments.hpp"
#include "weakrev/information_gain.hpp"
#include "weakrev/io.hpp"
#include "weakrev/qubit.hpp"
#include "weakrev/tomography.hpp"
#include "weakrev/weak_measurement.hpp"

namespace {

namespace fs = std::filesystem;
using namespace weakrev;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> noise_preset;
  std::optional<std::uint64_t> shots;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "JSON experiment config file");
  cmd->add_option("--seed", args->seed, "master RNG seed (overrides config)");
  cmd->add_option("--out", args->out_dir, "output directory (overrides config)");
  cmd->add_option("--noise", args->noise_preset,
                  "noise preset: off, paper-like, or custom (custom requires "
                  "a config file with a noise object)")
      ->check(CLI::IsMember({"off", "paper-like", "custom"}));
  cmd->add_option("--shots", args->shots, "shots per tomography setting");
}

ExperimentConfig resolve_config(const CommonArgs& args) {
  ExperimentConfig cfg;
  if (!args.config_path.empty()) cfg = load_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  if (args.out_dir) cfg.output_dir = *args.out_dir;
  if (args.noise_preset && *args.noise_preset != "custom") {
    const std::uint64_t shots = cfg.noise.shots_per_setting;
    cfg.noise = noise_from_preset(*args.noise_preset);
    cfg.noise.shots_per_setting = shots;
  } else if (args.noise_preset && *args.noise_preset == "custom" &&
             args.config_path.empty()) {
    throw config_error("--noise custom requires --config with a noise object");
  }
  if (args.shots) cfg.noise.shots_per_setting = *args.shots;
  // Environment override for the output directory only.
  if (const char* env = std::getenv("WEAKREV_OUT_DIR")) cfg.output_dir = env;
  cfg.validate();
  return cfg;
}

fs::path ensure_out_dir(const ExperimentConfig& cfg) {
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

int cmd_fig2(const CommonArgs& args) {
  const ExperimentConfig cfg = resolve_config(args);
  const fs::path dir = ensure_out_dir(cfg);
  const std::vector<Fig2Row> rows = run_fig2(cfg);
  write_fig2_csv(dir / "fig2.csv", rows);
  double min_fidelity = 1.0;
  std::size_t failed = 0;
  for (const Fig2Row& r : rows) {
    if (!r.ok) {
      ++failed;
      continue;
    }
    min_fidelity = std::min(min_fidelity, r.fidelity_initial_vs_recovered);
  }
  std::cout << "fig2: " << rows.size() << " cells, " << failed << " failed\n";
  std::cout << "min recovery fidelity = " << format_double(min_fidelity) << "\n";
  return failed == 0 ? 0 : 2;
}

int cmd_fig3(const CommonArgs& args) {
  const ExperimentConfig cfg = resolve_config(args);
  const fs::path dir = ensure_out_dir(cfg);
  const std::vector<Fig3Result> results = run_fig3(cfg);
  write_fig3_outputs(dir, results);
  double min_fidelity = 1.0;
  std::size_t failed = 0;
  for (const Fig3Result& r : results) {
    if (!r.ok) {
      ++failed;
      continue;
    }
    min_fidelity = std::min(min_fidelity, r.fidelity);
  }
  std::cout << "fig3: " << results.size() << " strengths, " << failed << " failed\n";
  std::cout << "min process fidelity = " << format_double(min_fidelity) << "\n";
  return failed == 0 ? 0 : 2;
}

int cmd_fig4(const CommonArgs& args, std::optional<std::uint64_t> samples) {
  ExperimentConfig cfg = resolve_config(args);
  if (samples) cfg.mc_samples = *samples;
  cfg.validate();
  const fs::path dir = ensure_out_dir(cfg);
  const std::vector<Fig4Row> rows = run_fig4(cfg);
  write_fig4_csv(dir / "fig4.csv", rows);
  double worst_sigma = 0.0;
  for (const Fig4Row& r : rows) {
    if (r.g1_stderr > 0.0)
      worst_sigma = std::max(worst_sigma,
                             std::abs(r.g1_mc - r.g1_analytic) / r.g1_stderr);
    if (r.g2_stderr > 0.0)
      worst_sigma = std::max(worst_sigma,
                             std::abs(r.g2_mc - r.g2_analytic) / r.g2_stderr);
  }
  std::cout << "fig4: " << rows.size() << " grid points, max |mc-analytic| = "
            << format_double(worst_sigma) << " sigma\n";
  return 0;
}

int cmd_trajectory(const CommonArgs& args, const std::string& state_label,
                   double p, std::uint64_t n, bool with_reversal) {
  const ExperimentConfig cfg = resolve_config(args);
  const fs::path dir = ensure_out_dir(cfg);
  const PureState psi = named_state(state_label);
  const CollapseStrength strength(p);

  CsvWriter csv(dir / "trajectory.csv", "trajectory/v1", {"trial", "outcome"});
  if (with_reversal) {
    std::uint64_t ok = 0, lost1 = 0, lost2 = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const ReversalTrajectory t =
          sample_reversal_trajectory(psi, strength, derive_stream(cfg.seed, i));
      csv.write_row({std::to_string(i), to_string(t.outcome)});
      switch (t.outcome) {
        case ReversalOutcome::reversed_ok: ++ok; break;
        case ReversalOutcome::lost_at_measurement: ++lost1; break;
        case ReversalOutcome::lost_at_reversal: ++lost2; break;
      }
    }
    const double n_d = static_cast<double>(n);
    std::cout << "reversal trajectories: n=" << n << " p=" << format_double(p)
              << "\n";
    std::cout << "success frequency = " << format_double(ok / n_d)
              << " (analytic 1-p = " << format_double(1.0 - p) << ")\n";
    std::cout << "lost at measurement = " << format_double(lost1 / n_d)
              << ", lost at reversal = " << format_double(lost2 / n_d) << "\n";
  } else {
    std::uint64_t clicks = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const TrajectoryOutcome t =
          sample_trajectory(psi, strength, derive_stream(cfg.seed, i));
      csv.write_row({std::to_string(i),
                     t.branch == Branch::click ? "click" : "no_click"});
      if (t.branch == Branch::click) ++clicks;
    }
    std::cout << "trajectories: n=" << n << " p=" << format_double(p) << "\n";
    std::cout << "click frequency = "
              << format_double(static_cast<double>(clicks) / static_cast<double>(n))
              << " (analytic P1 = "
              << format_double(click_probability(psi, strength)) << ")\n";
  }
  return 0;
}

int cmd_qst(const CommonArgs& args, const std::string& state_label) {
  const ExperimentConfig cfg = resolve_config(args);
  const fs::path dir = ensure_out_dir(cfg);
  const PureState psi = named_state(state_label);
  SplitMix64 rng(derive_stream(cfg.seed, 0));
  const std::vector<CountRecord> records = simulate_counts(
      DensityMatrix::from_pure(psi), standard_settings(), cfg.noise, rng);
  write_counts_csv(dir / "qst_counts.csv", records);
  const DensityMatrix rho = mle_state(records);
  nlohmann::json j;
  j["state"] = state_label;
  j["rho"] = matrix_to_json(rho.matrix());
  write_json_file(dir / "qst_rho.json", j);
  std::cout << "qst: state " << state_label << ", fidelity = "
            << format_double(fidelity_pure(psi, rho)) << "\n";
  return 0;
}

int cmd_qpt(const CommonArgs& args, double p) {
  ExperimentConfig cfg = resolve_config(args);
  cfg.p_grid = {p};
  cfg.validate();
  const fs::path dir = ensure_out_dir(cfg);
  const std::vector<Fig3Result> results = run_fig3(cfg);
  const Fig3Result& r = results.front();
  if (!r.ok) {
    std::cerr << "qpt failed: " << r.error << "\n";
    return 2;
  }
  nlohmann::json j;
  j["p"] = r.p;
  j["chi"] = matrix_to_json(r.chi->matrix());
  j["process_fidelity"] = r.fidelity;
  write_json_file(dir / "qpt_chi.json", j);
  std::cout << "qpt: p = " << format_double(p)
            << ", process fidelity = " << format_double(r.fidelity) << "\n";
  return 0;
}

int cmd_infogain(const CommonArgs& args, double p, std::uint64_t samples) {
  const ExperimentConfig cfg = resolve_config(args);
  const fs::path dir = ensure_out_dir(cfg);
  write_infogain_csv(dir / "infogain.csv",
                     strategy_dominance_scan(cfg.infogain_p_grid));
  const CollapseStrength strength(p);
  const EstimationResult a1 =
      estimation_fidelity_analytic(GuessStrategy::mixture, strength);
  const EstimationResult a2 =
      estimation_fidelity_analytic(GuessStrategy::zero, strength);
  const EstimationResult m1 = estimation_fidelity_mc(
      GuessStrategy::mixture, strength, samples, derive_stream(cfg.seed, 1));
  const EstimationResult m2 = estimation_fidelity_mc(
      GuessStrategy::zero, strength, samples, derive_stream(cfg.seed, 2));
  std::cout << "p = " << format_double(p) << "\n";
  std::cout << "strategy I : analytic " << format_double(a1.g_avg) << ", mc "
            << format_double(m1.g_avg) << " +- " << format_double(m1.std_error)
            << "\n";
  std::cout << "strategy II: analytic " << format_double(a2.g_avg) << ", mc "
            << format_double(m2.g_avg) << " +- " << format_double(m2.std_error)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weak (partial-collapse) measurement and reversal simulator"};
  app.require_subcommand(1);

  CommonArgs common;

  CLI::App* fig2 = app.add_subcommand(
      "fig2", "collapse/recovery across input states; writes fig2.csv");
  add_common(fig2, &common);

  CLI::App* fig3 = app.add_subcommand(
      "fig3",
      "process tomography of measurement+reversal; writes fig3_fidelity.csv "
      "and fig3_chi_p*.json");
  add_common(fig3, &common);

  CLI::App* fig4 = app.add_subcommand(
      "fig4", "estimation fidelity for both guessing strategies; writes fig4.csv");
  add_common(fig4, &common);
  std::optional<std::uint64_t> fig4_samples;
  fig4->add_option("--samples", fig4_samples, "Monte Carlo samples per point");

  CLI::App* trajectory = app.add_subcommand(
      "trajectory", "sample stochastic measurement outcomes; writes trajectory.csv");
  add_common(trajectory, &common);
  std::string traj_state = "D";
  double traj_p = 0.5;
  std::uint64_t traj_n = 10000;
  bool traj_reversal = false;
  trajectory->add_option("--state", traj_state, "input state label (H,V,D,A,R,L)");
  trajectory->add_option("--p", traj_p, "partial-collapse strength");
  trajectory->add_option("--n", traj_n, "number of trajectories");
  trajectory->add_flag("--reversal", traj_reversal,
                       "sample the full measurement+reversal sequence");

  CLI::App* qst = app.add_subcommand(
      "qst", "simulate and reconstruct one state; writes qst_counts.csv, qst_rho.json");
  add_common(qst, &common);
  std::string qst_state = "L";
  qst->add_option("--state", qst_state, "input state label (H,V,D,A,R,L)");

  CLI::App* qpt = app.add_subcommand(
      "qpt", "process tomography at one strength; writes qpt_chi.json");
  add_common(qpt, &common);
  double qpt_p = 0.895;
  qpt->add_option("--p", qpt_p, "partial-collapse strength");

  CLI::App* infogain = app.add_subcommand(
      "infogain", "analytic + Monte Carlo estimation fidelity; writes infogain.csv");
  add_common(infogain, &common);
  double info_p = 0.5;
  std::uint64_t info_samples = 100000;
  infogain->add_option("--p", info_p, "partial-collapse strength");
  infogain->add_option("--samples", info_samples, "Monte Carlo samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 1;
  }

  try {
    if (fig2->parsed()) return cmd_fig2(common);
    if (fig3->parsed()) return cmd_fig3(common);
    if (fig4->parsed()) return cmd_fig4(common, fig4_samples);
    if (trajectory->parsed())
      return cmd_trajectory(common, traj_state, traj_p, traj_n, traj_reversal);
    if (qst->parsed()) return cmd_qst(common, qst_state);
    if (qpt->parsed()) return cmd_qpt(common, qpt_p);
    if (infogain->parsed()) return cmd_infogain(common, info_p, info_samples);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
