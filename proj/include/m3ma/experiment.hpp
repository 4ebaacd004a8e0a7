#ifndef M3MA_EXPERIMENT_HPP
#define M3MA_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "m3ma/diagnostics.hpp"
#include "m3ma/dynamics.hpp"
#include "m3ma/game.hpp"

// Experiment configuration and file emission for the command-line driver.
// Configs are strict JSON: unknown keys are rejected, and exactly one of the
// score/derived game forms must be present. All outputs are deterministic
// for a given config and seed.

namespace m3ma {

struct GameConfig {
  int m = 2;
  std::optional<GameScores> scores;
  std::optional<DerivedParams> derived;

  DerivedParams params() const;  // validates feasibility
};

struct InitsConfig {
  enum class Kind { RandomInterior, Explicit };
  Kind kind = Kind::RandomInterior;
  int count = 1;
  std::uint64_t seed = 0;
  std::vector<Profile> explicit_profiles;
};

struct OutputsConfig {
  std::string trajectory_csv;  // empty: no trajectory files
  std::string summary_json;    // empty: no summary file
};

struct ExperimentConfig {
  GameConfig game;
  Regularizer regularizer = Regularizer::Entropic;
  IntegrationMode mode = IntegrationMode::DualFtrl;
  double step = 0.02;
  double horizon = 100.0;
  int record_every = 1;
  InitsConfig inits;
  OutputsConfig outputs;

  IntegratorConfig integrator() const;
};

ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);  // fnv1a over the dump

// Trajectory CSV schema: header "t,x_1..x_m,y_1..y_m,z_1..z_m,V,G", values
// with 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);

struct InitResult {
  std::uint64_t seed = 0;
  RegimeLabel label;
  double v_initial = 0.0;
  double v_min = 0.0;  // over the whole trajectory; exposes non-monotone V
  double v_terminal = 0.0;
  double g_terminal = 0.0;
  double max_vdot_residual = 0.0;  // NaN when no eligible samples
  double max_gdot_residual = 0.0;
  bool truncated = false;
  bool blew_up = false;
};

struct SimulateOutcome {
  std::vector<InitResult> per_init;
  int exit_code = 0;  // 0 ok, 3 when any init blew up
};

// Runs every configured init, writing one trajectory CSV per init (an
// _init<k> suffix is added when count > 1) and the summary JSON. Paths are
// resolved against out_dir when relative.
SimulateOutcome run_simulate(const ExperimentConfig& cfg,
                             const std::string& out_dir);

struct SweepCellResult {
  double alpha = 0.0;
  double gamma = 0.0;
  std::string dir;
  std::string status;  // "ok" or an error description
  std::vector<InitResult> per_init;
};

struct SweepOutcome {
  std::vector<SweepCellResult> cells;
  int exit_code = 0;  // 0 if any cell succeeded, 3 if all failed
};

// One simulate run per (alpha, gamma) grid cell, cells in parallel; writes
// an index JSON mapping each cell to its regime-label histogram. Infeasible
// cells (e.g. |gamma| >= beta when scores are requested) are recorded in the
// index, not fatal.
SweepOutcome run_sweep(const ExperimentConfig& base,
                       const std::vector<double>& alphas,
                       const std::vector<double>& gammas,
                       const std::string& out_dir);

// Identity and property suites behind the selftest command; prints one
// PASS/FAIL line per suite. Returns true iff all pass. Output is
// byte-identical for identical seeds.
bool run_selftest(std::uint64_t seed, std::ostream& os);

}  // namespace m3ma

#endif  // M3MA_EXPERIMENT_HPP
