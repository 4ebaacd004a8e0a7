#ifndef M3MA_DYNAMICS_HPP
#define M3MA_DYNAMICS_HPP

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "m3ma/game.hpp"

// Continuous-time learning dynamics: each player accumulates its payoff
// gradient in a dual vector and plays the mirror image
//   q(d) = argmax_x { d.x - h(x) }  over the simplex,
// with h either the entropic regularizer (x.log x, giving softmax duals and
// replicator dynamics) or the Euclidean one (|x|^2/2, giving projected
// gradient ascent). Trajectories are integrated with classical RK4.

namespace m3ma {

enum class Regularizer { Entropic, Euclidean };
enum class IntegrationMode { DualFtrl, PrimalReplicator, TwoActionReduced };

const char* regularizer_name(Regularizer r);
const char* mode_name(IntegrationMode m);

// Mirror map q(dual). Entropic: max-shifted softmax. Euclidean: exact
// projection onto the simplex (sort and threshold).
std::vector<double> mirror_map(std::span<const double> dual, Regularizer reg);

// Convex conjugate value max_x { dual.x - h(x) }; log-sum-exp for the
// entropic regularizer.
double conjugate_value(std::span<const double> dual, Regularizer reg);

// One vector per player; doubles as dual storage and as velocity storage.
struct PlayerVectors {
  std::vector<double> x, y, z;

  static PlayerVectors zeros(int m);
  int actions() const { return static_cast<int>(x.size()); }
};

// Dual velocities (the raw payoff gradients, offset included).
PlayerVectors ftrl_dual_velocity(const Profile& profile,
                                 const DerivedParams& game);

// Primal replicator field: xdot_i = x_i (f_i - sum_j x_j f_j).
PlayerVectors replicator_rhs(const Profile& profile, const DerivedParams& game);

// Primal projected-gradient field, interior only: xdot_i = f_i - mean(f).
// Throws std::domain_error when any component is 0 within 1e-12.
PlayerVectors gradient_ascent_rhs(const Profile& profile,
                                  const DerivedParams& game);

// Reduced two-action field on (x1, y1, z1):
//   x1dot = w(x1) { alpha (y1 + z1 - 1) + beta (y1 - z1) },  cyclically,
// with w(p) = p(1-p) entropic, 1/2 Euclidean. Never reads gamma.
std::array<double, 3> two_action_rhs(const std::array<double, 3>& firsts,
                                     const DerivedParams& game,
                                     Regularizer reg);

// Classical RK4 update of a flat state vector. The derivative callback fills
// `out` (same length as `state`) given the stage state.
void rk4_update(std::vector<double>& state, double h,
                const std::function<void(std::span<const double>,
                                         std::span<double>)>& deriv);

struct LearnerState {
  PlayerVectors duals;
  Profile primal;
  double t = 0.0;
};

struct IntegratorConfig {
  double step = 0.02;
  double horizon = 100.0;
  IntegrationMode mode = IntegrationMode::DualFtrl;
  Regularizer regularizer = Regularizer::Entropic;
  int record_every = 1;
  double dual_magnitude_guard = 1e6;  // graceful truncation threshold

  void validate() const;
};

struct TrajectorySample {
  double t;
  Profile profile;
  double V;  // sync measure, see diagnostics
  double G;  // conjugate divergence, see diagnostics
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  IntegratorConfig config;
  DerivedParams game;
  Profile initial;
  bool truncated = false;  // dual guard tripped; samples end early
  bool blew_up = false;    // non-finite state; samples end early

  Trajectory(IntegratorConfig cfg, DerivedParams g, Profile init)
      : config(cfg), game(g), initial(std::move(init)) {}
};

// Builds the mode's state for an initial primal profile (entropic modes need
// strictly positive components; duals are componentwise logs).
LearnerState make_initial_state(const Profile& initial,
                                const IntegratorConfig& config);

// Single RK4 step of the configured mode; primal cache refreshed.
LearnerState rk4_step(const LearnerState& state, double h,
                      const DerivedParams& game,
                      const IntegratorConfig& config);

// Integrates to the horizon, recording (t, profile, V, G) every
// record_every steps plus the initial and final states. Non-finite states
// abort with the partial trajectory and blew_up set.
Trajectory simulate(const Profile& initial, const DerivedParams& game,
                    const IntegratorConfig& config);

}  // namespace m3ma

#endif  // M3MA_DYNAMICS_HPP
