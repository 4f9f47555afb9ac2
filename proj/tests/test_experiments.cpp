#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "weakrev/experiments.hpp"

using namespace weakrev;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_noiseless_config() {
  ExperimentConfig cfg;
  cfg.p_grid = {0.0, 0.5, 0.895};
  cfg.input_states = {StateSpec{"H", named_state(StateLabel::H)},
                      StateSpec{"D", named_state(StateLabel::D)},
                      StateSpec{"L", named_state(StateLabel::L)}};
  cfg.noise = NoiseModel::off();
  cfg.seed = 777;
  return cfg;
}

}  // namespace

// ---------- defaults and config ----------

TEST_CASE("default input set is the cardinal six plus the cube eight") {
  const std::vector<StateSpec> states = default_input_states();
  REQUIRE(states.size() == 14);
  std::set<std::string> labels;
  for (const StateSpec& s : states) {
    labels.insert(s.label);
    const BlochVector b = bloch_from(DensityMatrix::from_pure(s.state));
    CHECK(std::abs(b.norm() - 1.0) < 1e-10);
  }
  CHECK(labels.size() == 14);
  CHECK(labels.count("H") == 1);
  CHECK(labels.count("+++") == 1);
  CHECK(labels.count("---") == 1);
}

TEST_CASE("config JSON parsing") {
  const auto j = nlohmann::json::parse(R"({
    "seed": 99,
    "output_dir": "results",
    "p_grid": [0.1, 0.6],
    "infogain_p_grid": [0.0, 1.0],
    "mc_samples": 5000,
    "plate_transmittance": 0.8,
    "shots_per_setting": 2000,
    "noise": {"preset": "custom", "waveplate_jitter_deg": 0.2,
              "p_mismatch": 0.005, "poisson": true},
    "input_states": ["H",
                     {"label": "tilted", "bloch": [0.6, 0.0, 0.8]},
                     {"label": "raw", "amplitudes": [[0.6, 0.0], [0.0, 0.8]]}]
  })");
  const ExperimentConfig cfg = config_from_json(j);
  CHECK(cfg.seed == 99);
  CHECK(cfg.output_dir == "results");
  CHECK(cfg.p_grid == std::vector<double>{0.1, 0.6});
  CHECK(cfg.mc_samples == 5000);
  CHECK(cfg.noise.shots_per_setting == 2000);  // top-level override wins
  CHECK(cfg.noise.waveplate_jitter_deg == 0.2);
  CHECK(cfg.noise.p_mismatch == 0.005);
  CHECK(cfg.noise.enable_poisson);
  REQUIRE(cfg.input_states.size() == 3);
  CHECK(cfg.input_states[1].label == "tilted");
  CHECK(cfg.input_states[2].state.alpha().real() == Catch::Approx(0.6).margin(1e-12));
}

TEST_CASE("a plate grid derives the strength grid from the stack model") {
  const auto j = nlohmann::json::parse(
      R"({"plate_transmittance": 0.8, "plate_grid": [0, 1, 4]})");
  const ExperimentConfig cfg = config_from_json(j);
  REQUIRE(cfg.p_grid.size() == 3);
  CHECK(cfg.p_grid[0] == 0.0);
  CHECK(cfg.p_grid[1] == Catch::Approx(0.2).margin(1e-12));
  CHECK(cfg.p_grid[2] == Catch::Approx(0.5904).margin(1e-12));  // 1 - 0.8^4

  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(
                      R"({"p_grid": [0.5], "plate_grid": [2]})")),
                  config_error);
}

TEST_CASE("config validation failures") {
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"p_grid": [1.0]})")),
                  config_error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"input_states": []})")),
                  config_error);
  CHECK_THROWS_AS(
      config_from_json(nlohmann::json::parse(R"({"input_states": ["Q"]})")),
      config_error);
  CHECK_THROWS_AS(
      config_from_json(nlohmann::json::parse(R"({"noise": {"preset": "exotic"}})")),
      config_error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"mc_samples": 0})")),
                  config_error);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), config_error);
}

// ---------- fig2 ----------

TEST_CASE("noiseless fig2 recovers every state") {
  const std::vector<Fig2Row> rows = run_fig2(small_noiseless_config());
  REQUIRE(rows.size() == 9);
  for (const Fig2Row& r : rows) {
    REQUIRE(r.ok);
    CHECK(r.fidelity_initial_vs_recovered == Catch::Approx(1.0).margin(1e-6));
  }
}

TEST_CASE("collapse leaves |H> in place but moves |D| toward the pole") {
  const std::vector<Fig2Row> rows = run_fig2(small_noiseless_config());
  for (const Fig2Row& r : rows) {
    if (r.state_label == "H") {
      CHECK(std::abs(r.bloch_collapsed.x - r.bloch_initial.x) < 1e-5);
      CHECK(std::abs(r.bloch_collapsed.y - r.bloch_initial.y) < 1e-5);
      CHECK(std::abs(r.bloch_collapsed.z - r.bloch_initial.z) < 1e-5);
    }
    if (r.state_label == "D" && r.p == 0.895) {
      CHECK(r.bloch_collapsed.z > 0.5);   // pushed toward |H>
      CHECK(r.bloch_collapsed.x < 0.9);   // off the equator
      CHECK(std::abs(r.bloch_recovered.x - 1.0) < 1e-5);  // and back
    }
  }
}

TEST_CASE("a cell whose reversal strength reaches 1 fails in place") {
  ExperimentConfig cfg = small_noiseless_config();
  cfg.p_grid = {0.5, 0.995};
  cfg.noise.p_mismatch = 0.01;  // 0.995 + 0.01 > 1
  const std::vector<Fig2Row> rows = run_fig2(cfg);
  REQUIRE(rows.size() == 6);
  int failed = 0;
  for (const Fig2Row& r : rows) {
    if (r.p == 0.995) {
      CHECK_FALSE(r.ok);
      CHECK_FALSE(r.error.empty());
      ++failed;
    } else {
      CHECK(r.ok);
    }
  }
  CHECK(failed == 3);
}

// ---------- fig3 ----------

TEST_CASE("noiseless fig3 reconstructs the identity process at every p") {
  ExperimentConfig cfg = small_noiseless_config();
  const std::vector<Fig3Result> results = run_fig3(cfg);
  REQUIRE(results.size() == 3);
  for (const Fig3Result& r : results) {
    REQUIRE(r.ok);
    REQUIRE(r.chi.has_value());
    CHECK(r.fidelity >= 1.0 - 1e-6);
    CHECK(max_abs_diff(r.chi->matrix(), ChiMatrix::ideal_identity().matrix()) < 1e-6);
  }
}

// ---------- fig4 ----------

TEST_CASE("fig4 analytic columns hit the endpoints exactly") {
  ExperimentConfig cfg;
  cfg.infogain_p_grid = {0.0, 0.5, 1.0};
  cfg.mc_samples = 20000;
  cfg.seed = 5;
  const std::vector<Fig4Row> rows = run_fig4(cfg);
  REQUIRE(rows.size() == 3);
  CHECK(rows.front().g1_analytic == 0.5);
  CHECK(rows.front().g2_analytic == 0.5);
  CHECK(rows.back().g1_analytic == Catch::Approx(2.0 / 3.0).margin(1e-15));
  CHECK(rows.back().g2_analytic == Catch::Approx(2.0 / 3.0).margin(1e-15));
  for (const Fig4Row& r : rows) {
    CHECK(std::abs(r.g1_mc - r.g1_analytic) < 3.0 * std::max(r.g1_stderr, 1e-12));
    CHECK(std::abs(r.g2_mc - r.g2_analytic) < 3.0 * std::max(r.g2_stderr, 1e-12));
    CHECK(r.g2_analytic >= r.g1_analytic);
  }
}

// ---------- determinism and serialization ----------

TEST_CASE("identical config and seed give identical results and bytes") {
  ExperimentConfig cfg = small_noiseless_config();
  cfg.noise = NoiseModel::paper_like();

  const std::vector<Fig2Row> a = run_fig2(cfg);
  const std::vector<Fig2Row> b = run_fig2(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].fidelity_initial_vs_recovered == b[i].fidelity_initial_vs_recovered);
    CHECK(a[i].bloch_recovered.x == b[i].bloch_recovered.x);
    CHECK(a[i].bloch_recovered.y == b[i].bloch_recovered.y);
    CHECK(a[i].bloch_recovered.z == b[i].bloch_recovered.z);
  }

  const fs::path dir = fs::temp_directory_path() / "weakrev_test_determinism";
  fs::create_directories(dir);
  write_fig2_csv(dir / "a.csv", a);
  write_fig2_csv(dir / "b.csv", b);
  CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
  fs::remove_all(dir);
}

TEST_CASE("a different seed changes noisy results") {
  ExperimentConfig cfg = small_noiseless_config();
  cfg.noise = NoiseModel::paper_like();
  ExperimentConfig other = cfg;
  other.seed = cfg.seed + 1;
  const std::vector<Fig2Row> a = run_fig2(cfg);
  const std::vector<Fig2Row> b = run_fig2(other);
  bool any_difference = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    any_difference = any_difference || a[i].fidelity_initial_vs_recovered !=
                                           b[i].fidelity_initial_vs_recovered;
  CHECK(any_difference);
}

TEST_CASE("CSV files carry their schema tag and headers") {
  const fs::path dir = fs::temp_directory_path() / "weakrev_test_schema";
  fs::create_directories(dir);

  ExperimentConfig cfg = small_noiseless_config();
  write_fig2_csv(dir / "fig2.csv", run_fig2(cfg));
  const std::string fig2 = read_file(dir / "fig2.csv");
  CHECK(fig2.rfind("#schema=fig2/v1\n", 0) == 0);
  CHECK(fig2.find("state,p,fidelity,") != std::string::npos);

  write_fig3_outputs(dir, run_fig3(cfg));
  const std::string fig3 = read_file(dir / "fig3_fidelity.csv");
  CHECK(fig3.rfind("#schema=fig3/v1\n", 0) == 0);
  CHECK(fs::exists(dir / "fig3_chi_p0.895.json"));
  const auto chi_json = nlohmann::json::parse(read_file(dir / "fig3_chi_p0.895.json"));
  CHECK(chi_json.at("chi").size() == 4);
  CHECK(chi_json.at("chi")[0][0].size() == 2);  // [re, im] pair
  CHECK(chi_json.at("chi")[0][0][0].get<double>() == Catch::Approx(1.0).margin(1e-6));

  write_infogain_csv(dir / "infogain.csv", strategy_dominance_scan({0.0, 0.5}));
  const std::string info = read_file(dir / "infogain.csv");
  CHECK(info.rfind("#schema=infogain/v1\n", 0) == 0);
  CHECK(info.find("p,g_strategy_I,g_strategy_II,difference") != std::string::npos);

  // Count records serialize with the documented header.
  const auto records =
      simulate_counts(DensityMatrix::from_pure(named_state(StateLabel::D)),
                      standard_settings(), NoiseModel::off(), 3);
  write_counts_csv(dir / "counts.csv", records);
  const std::string counts = read_file(dir / "counts.csv");
  CHECK(counts.find("setting,count,shots\n") != std::string::npos);
  CHECK(counts.find("H,5000,10000\n") != std::string::npos);

  fs::remove_all(dir);
}
