#ifndef M3MA_DIAGNOSTICS_HPP
#define M3MA_DIAGNOSTICS_HPP

#include <array>
#include <vector>

#include "m3ma/dynamics.hpp"
#include "m3ma/game.hpp"

// Trajectory diagnostics: the synchronization measure V, the conjugate
// divergence G, their closed-form time derivatives along the learning flow,
// and the regime classifier used to label whole trajectories.

namespace m3ma {

// V = sum_i x_i y_i z_i - 1/m^2: the probability all three players pick the
// same action, centered so the uniform profile gives 0. Range is
// [-1/m^2, 1 - 1/m^2]; the maximum is attained exactly at symmetric pure
// profiles, the minimum exactly when every action has a zero among players.
double sync_V(const Profile& profile);

// G = sum over players of [ conjugate_value(dual) - mean(dual) ]. Reported
// as literally defined; subtract g_uniform_offset to get a sum of
// divergences from the uniform strategy (>= 0, zero iff uniform).
double divergence_G(const PlayerVectors& duals, Regularizer reg, int m);

// The constant -3 h(uniform): 3 log m entropic, -3/(2m) Euclidean.
double g_uniform_offset(Regularizer reg, int m);

// Closed-form dV/dt along the learning flow.
//   m = 2 (either regularizer): alpha * sum_cyc w(x1) (y1 + z1 - 1)^2.
//   m > 2, entropic:            alpha * sum_cyc Var_{x}[y_i z_i].
// The m > 2 form is the replicator-flow derivative of competition-neutral
// games (gamma = 0); with gamma != 0 the flow picks up extra terms and the
// returned value is the alpha part only. Sign always equals sign(alpha),
// vanishing only at the uniform profile. Throws std::domain_error for the
// Euclidean regularizer with m > 2 (no closed form).
double v_dot_analytic(const Profile& profile, const DerivedParams& game,
                      Regularizer reg);

// Exact dG/dt along the dual flow for any regularizer and any m:
//   sum_cyc sum_i f(y_i, z_i) (x_i - 1/m).
// For m = 2 this equals 2 alpha V.
double g_dot_analytic(const Profile& profile, const DerivedParams& game);

enum class RegimeTag { Cycling, Synchronizing, Desynchronizing, Mixed };

const char* regime_tag_name(RegimeTag t);

struct RegimeEvidence {
  double v_trend = 0.0;         // V(end) - V(start)
  double terminal_sync = 0.0;   // sum_i x_i y_i z_i at the last sample
  double recurrence_score = 0.0;  // best recurrence distance found (inf if none)
};

struct RegimeLabel {
  RegimeTag tag = RegimeTag::Mixed;
  RegimeEvidence evidence;
};

struct ClassifierConfig {
  double sync_threshold = 0.99;     // terminal sum for Synchronizing
  double desync_threshold = 0.01;   // terminal sum for Desynchronizing
  double v_return_rel_tol = 1e-4;   // |V(end)-V(start)| <= tol*(1+|V(start)|)
  double recurrence_tol = 1e-2;     // max-norm ball for a recurrence hit
  double min_recurrence_gap = 5.0;  // time separation of recurring samples
  int recurrence_candidates = 32;   // later samples probed for recurrence
};

// Labels a trajectory (>= 100 samples required): Synchronizing, then
// Desynchronizing, then Cycling (V returns and the state recurs after a
// quarter of the horizon), else Mixed. Thresholds are configurable.
RegimeLabel classify_trajectory(const Trajectory& traj,
                                const ClassifierConfig& cfg = {});

// Heteroclinic itinerary for m = 2: nearest cube vertex of (x1, y1, z1) per
// sample from t_min on, consecutive duplicates collapsed.
std::vector<std::array<int, 3>> vertex_itinerary(const Trajectory& traj,
                                                 double t_min);

// True iff consecutive visits follow the alternating-coordinate six-cycle
// (0,0,1) -> (0,1,1) -> (0,1,0) -> (1,1,0) -> (1,0,0) -> (1,0,1) -> ...
// and at least min_transitions transitions are present.
bool follows_six_cycle(const std::vector<std::array<int, 3>>& visits,
                       int min_transitions);

}  // namespace m3ma

#endif  // M3MA_DIAGNOSTICS_HPP
