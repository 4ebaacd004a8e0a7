#include "m3ma/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace m3ma {

double sync_V(const Profile& profile) {
  const int m = profile.actions();
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += profile.x[i] * profile.y[i] * profile.z[i];
  return s - 1.0 / (m * m);
}

double divergence_G(const PlayerVectors& duals, Regularizer reg, int m) {
  double g = 0.0;
  for (const std::vector<double>* d : {&duals.x, &duals.y, &duals.z}) {
    if (static_cast<int>(d->size()) != m)
      throw std::invalid_argument("divergence_G: dual length != m");
    const double mean =
        std::accumulate(d->begin(), d->end(), 0.0) / static_cast<double>(m);
    g += conjugate_value(*d, reg) - mean;
  }
  return g;
}

double g_uniform_offset(Regularizer reg, int m) {
  return reg == Regularizer::Entropic ? 3.0 * std::log(static_cast<double>(m))
                                      : -1.5 / static_cast<double>(m);
}

namespace {

double cyc_weighted_square(const Profile& p, Regularizer reg) {
  // sum_cyc w(x1) (y1 + z1 - 1)^2 for m = 2
  auto w = [reg](double v) {
    return reg == Regularizer::Entropic ? v * (1.0 - v) : 0.5;
  };
  const double x1 = p.x[0], y1 = p.y[0], z1 = p.z[0];
  const double tx = y1 + z1 - 1.0, ty = z1 + x1 - 1.0, tz = x1 + y1 - 1.0;
  return w(x1) * tx * tx + w(y1) * ty * ty + w(z1) * tz * tz;
}

double cyc_product_variance(const Profile& p) {
  // sum_cyc Var over i of (opponent product) under the own distribution
  double total = 0.0;
  const Strategy* players[3] = {&p.x, &p.y, &p.z};
  for (int c = 0; c < 3; ++c) {
    const Strategy& own = *players[c];
    const Strategy& first = *players[(c + 1) % 3];
    const Strategy& second = *players[(c + 2) % 3];
    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i < p.actions(); ++i) {
      const double prod = first[i] * second[i];
      e1 += own[i] * prod;
      e2 += own[i] * prod * prod;
    }
    total += e2 - e1 * e1;
  }
  return total;
}

}  // namespace

double v_dot_analytic(const Profile& profile, const DerivedParams& game,
                      Regularizer reg) {
  if (profile.actions() == 2)
    return game.alpha * cyc_weighted_square(profile, reg);
  if (reg == Regularizer::Euclidean)
    throw std::domain_error(
        "v_dot_analytic: no closed form for the Euclidean regularizer with "
        "m > 2");
  return game.alpha * cyc_product_variance(profile);
}

double g_dot_analytic(const Profile& profile, const DerivedParams& game) {
  const int m = profile.actions();
  const double ref = 1.0 / m;
  double total = 0.0;
  const Strategy* players[3] = {&profile.x, &profile.y, &profile.z};
  for (int c = 0; c < 3; ++c) {
    const Strategy& own = *players[c];
    const Strategy& first = *players[(c + 1) % 3];
    const Strategy& second = *players[(c + 2) % 3];
    for (int i = 0; i < m; ++i)
      total += gradient_component(first[i], second[i], game) * (own[i] - ref);
  }
  return total;
}

const char* regime_tag_name(RegimeTag t) {
  switch (t) {
    case RegimeTag::Cycling: return "Cycling";
    case RegimeTag::Synchronizing: return "Synchronizing";
    case RegimeTag::Desynchronizing: return "Desynchronizing";
    case RegimeTag::Mixed: return "Mixed";
  }
  return "?";
}

namespace {

double sample_distance(const TrajectorySample& a, const TrajectorySample& b) {
  double d = 0.0;
  const int m = a.profile.actions();
  for (int i = 0; i < m; ++i) {
    d = std::max(d, std::abs(a.profile.x[i] - b.profile.x[i]));
    d = std::max(d, std::abs(a.profile.y[i] - b.profile.y[i]));
    d = std::max(d, std::abs(a.profile.z[i] - b.profile.z[i]));
  }
  return d;
}

// Looks for a later sample (t >= horizon/4) that comes back within tol of a
// sufficiently earlier one. Returns the best distance found.
double recurrence_score(const Trajectory& traj, const ClassifierConfig& cfg) {
  const auto& s = traj.samples;
  const double t_min = traj.config.horizon / 4.0;
  double best = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(s.size());
  const int stride =
      std::max(1, n / std::max(1, cfg.recurrence_candidates));
  for (int c = n - 1; c >= 0; c -= stride) {
    const TrajectorySample& cand = s[static_cast<size_t>(c)];
    if (cand.t < t_min) break;
    for (int j = 0; j < c; ++j) {
      const TrajectorySample& early = s[static_cast<size_t>(j)];
      if (early.t > cand.t - cfg.min_recurrence_gap) break;
      best = std::min(best, sample_distance(cand, early));
      if (best <= cfg.recurrence_tol) return best;
    }
  }
  return best;
}

}  // namespace

RegimeLabel classify_trajectory(const Trajectory& traj,
                                const ClassifierConfig& cfg) {
  if (traj.samples.size() < 100)
    throw std::invalid_argument(
        "classify_trajectory: needs at least 100 samples");
  const TrajectorySample& first = traj.samples.front();
  const TrajectorySample& last = traj.samples.back();
  const int m = first.profile.actions();
  RegimeLabel label;
  label.evidence.v_trend = last.V - first.V;
  label.evidence.terminal_sync = last.V + 1.0 / (m * m);
  label.evidence.recurrence_score = std::numeric_limits<double>::infinity();

  if (label.evidence.terminal_sync >= cfg.sync_threshold) {
    label.tag = RegimeTag::Synchronizing;
    return label;
  }
  if (label.evidence.terminal_sync <= cfg.desync_threshold &&
      label.evidence.v_trend <= 0.0) {
    label.tag = RegimeTag::Desynchronizing;
    return label;
  }
  const bool v_returns = std::abs(last.V - first.V) <=
                         cfg.v_return_rel_tol * (1.0 + std::abs(first.V));
  if (v_returns) {
    label.evidence.recurrence_score = recurrence_score(traj, cfg);
    if (label.evidence.recurrence_score <= cfg.recurrence_tol) {
      label.tag = RegimeTag::Cycling;
      return label;
    }
  }
  label.tag = RegimeTag::Mixed;
  return label;
}

std::vector<std::array<int, 3>> vertex_itinerary(const Trajectory& traj,
                                                 double t_min) {
  if (!traj.samples.empty() && traj.samples.front().profile.actions() != 2)
    throw std::invalid_argument("vertex_itinerary: requires m = 2");
  std::vector<std::array<int, 3>> visits;
  for (const TrajectorySample& s : traj.samples) {
    if (s.t < t_min) continue;
    const std::array<int, 3> v = {s.profile.x[0] > 0.5 ? 1 : 0,
                                  s.profile.y[0] > 0.5 ? 1 : 0,
                                  s.profile.z[0] > 0.5 ? 1 : 0};
    if (visits.empty() || visits.back() != v) visits.push_back(v);
  }
  return visits;
}

bool follows_six_cycle(const std::vector<std::array<int, 3>>& visits,
                       int min_transitions) {
  // x flips when y == z, y flips when z == x, z flips when x == y; the six
  // non-diagonal vertices form a single loop under this successor rule.
  static const std::array<std::array<int, 3>, 6> cycle = {{{0, 0, 1},
                                                           {0, 1, 1},
                                                           {0, 1, 0},
                                                           {1, 1, 0},
                                                           {1, 0, 0},
                                                           {1, 0, 1}}};
  auto successor = [](const std::array<int, 3>& v)
      -> std::optional<std::array<int, 3>> {
    for (size_t i = 0; i < cycle.size(); ++i)
      if (cycle[i] == v) return cycle[(i + 1) % cycle.size()];
    return std::nullopt;  // (0,0,0) and (1,1,1) are off the loop
  };
  if (static_cast<int>(visits.size()) < min_transitions + 1) return false;
  for (size_t i = 0; i + 1 < visits.size(); ++i) {
    const auto next = successor(visits[i]);
    if (!next || *next != visits[i + 1]) return false;
  }
  return true;
}

}  // namespace m3ma
