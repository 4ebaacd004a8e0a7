#include "m3ma/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace m3ma {

namespace {

constexpr double kEntropicFloor = 1e-12;

void softmax_into(std::span<const double> dual, std::span<double> out) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double d : dual) mx = std::max(mx, d);
  double sum = 0.0;
  for (size_t i = 0; i < dual.size(); ++i) {
    out[i] = std::exp(dual[i] - mx);
    sum += out[i];
  }
  for (size_t i = 0; i < dual.size(); ++i) out[i] /= sum;
}

void project_simplex_into(std::span<const double> dual, std::span<double> out,
                          std::vector<double>& scratch) {
  const size_t m = dual.size();
  scratch.assign(dual.begin(), dual.end());
  std::sort(scratch.begin(), scratch.end(), std::greater<double>());
  double cumsum = 0.0, tau = 0.0;
  int rho = 0;
  for (size_t j = 0; j < m; ++j) {
    cumsum += scratch[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (scratch[j] - t > 0.0) {
      rho = static_cast<int>(j + 1);
      tau = t;
    }
  }
  (void)rho;
  for (size_t i = 0; i < m; ++i) out[i] = std::max(dual[i] - tau, 0.0);
}

void check_finite(std::span<const double> v, const char* what) {
  for (double d : v)
    if (!std::isfinite(d))
      throw std::invalid_argument(std::string(what) + ": non-finite input");
}

double two_action_weight(double p, Regularizer reg) {
  return reg == Regularizer::Entropic ? p * (1.0 - p) : 0.5;
}

}  // namespace

const char* regularizer_name(Regularizer r) {
  return r == Regularizer::Entropic ? "entropic" : "euclidean";
}

const char* mode_name(IntegrationMode m) {
  switch (m) {
    case IntegrationMode::DualFtrl: return "dual";
    case IntegrationMode::PrimalReplicator: return "primal_replicator";
    case IntegrationMode::TwoActionReduced: return "two_action";
  }
  return "?";
}

std::vector<double> mirror_map(std::span<const double> dual, Regularizer reg) {
  check_finite(dual, "mirror_map");
  std::vector<double> out(dual.size());
  if (reg == Regularizer::Entropic) {
    softmax_into(dual, out);
  } else {
    std::vector<double> scratch;
    project_simplex_into(dual, out, scratch);
  }
  return out;
}

double conjugate_value(std::span<const double> dual, Regularizer reg) {
  check_finite(dual, "conjugate_value");
  if (reg == Regularizer::Entropic) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double d : dual) mx = std::max(mx, d);
    double sum = 0.0;
    for (double d : dual) sum += std::exp(d - mx);
    return mx + std::log(sum);
  }
  std::vector<double> q(dual.size()), scratch;
  project_simplex_into(dual, q, scratch);
  double val = 0.0;
  for (size_t i = 0; i < q.size(); ++i) val += dual[i] * q[i] - 0.5 * q[i] * q[i];
  return val;
}

PlayerVectors PlayerVectors::zeros(int m) {
  PlayerVectors v;
  v.x.assign(static_cast<size_t>(m), 0.0);
  v.y.assign(static_cast<size_t>(m), 0.0);
  v.z.assign(static_cast<size_t>(m), 0.0);
  return v;
}

PlayerVectors ftrl_dual_velocity(const Profile& profile,
                                 const DerivedParams& game) {
  PlayerVectors v;
  v.x = payoff_gradient(profile.y, profile.z, game);
  v.y = payoff_gradient(profile.z, profile.x, game);
  v.z = payoff_gradient(profile.x, profile.y, game);
  return v;
}

namespace {

void replicator_into(std::span<const double> own, std::span<const double> f,
                     std::span<double> out) {
  double avg = 0.0;
  for (size_t i = 0; i < own.size(); ++i) avg += own[i] * f[i];
  for (size_t i = 0; i < own.size(); ++i) out[i] = own[i] * (f[i] - avg);
}

}  // namespace

PlayerVectors replicator_rhs(const Profile& profile,
                             const DerivedParams& game) {
  PlayerVectors f = ftrl_dual_velocity(profile, game);
  PlayerVectors out = PlayerVectors::zeros(profile.actions());
  replicator_into(profile.x.probs(), f.x, out.x);
  replicator_into(profile.y.probs(), f.y, out.y);
  replicator_into(profile.z.probs(), f.z, out.z);
  return out;
}

PlayerVectors gradient_ascent_rhs(const Profile& profile,
                                  const DerivedParams& game) {
  for (int i = 0; i < profile.actions(); ++i)
    if (profile.x[i] <= 1e-12 || profile.y[i] <= 1e-12 ||
        profile.z[i] <= 1e-12)
      throw std::domain_error(
          "gradient_ascent_rhs: profile on the boundary; use the dual mode");
  PlayerVectors f = ftrl_dual_velocity(profile, game);
  const int m = profile.actions();
  auto center = [m](std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / m;
    for (double& d : v) d -= mean;
  };
  center(f.x);
  center(f.y);
  center(f.z);
  return f;
}

std::array<double, 3> two_action_rhs(const std::array<double, 3>& firsts,
                                     const DerivedParams& game,
                                     Regularizer reg) {
  const double x1 = firsts[0], y1 = firsts[1], z1 = firsts[2];
  const double a = game.alpha, b = game.beta;
  return {
      two_action_weight(x1, reg) * (a * (y1 + z1 - 1.0) + b * (y1 - z1)),
      two_action_weight(y1, reg) * (a * (z1 + x1 - 1.0) + b * (z1 - x1)),
      two_action_weight(z1, reg) * (a * (x1 + y1 - 1.0) + b * (x1 - y1)),
  };
}

void rk4_update(std::vector<double>& state, double h,
                const std::function<void(std::span<const double>,
                                         std::span<double>)>& deriv) {
  const size_t n = state.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  deriv(state, k1);
  for (size_t i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * h * k1[i];
  deriv(tmp, k2);
  for (size_t i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * h * k2[i];
  deriv(tmp, k3);
  for (size_t i = 0; i < n; ++i) tmp[i] = state[i] + h * k3[i];
  deriv(tmp, k4);
  for (size_t i = 0; i < n; ++i)
    state[i] += (h / 6.0) * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
}

void IntegratorConfig::validate() const {
  if (!(step > 0.0)) throw std::invalid_argument("IntegratorConfig: step <= 0");
  if (!(horizon > 0.0))
    throw std::invalid_argument("IntegratorConfig: horizon <= 0");
  if (record_every < 1)
    throw std::invalid_argument("IntegratorConfig: record_every < 1");
  if (mode == IntegrationMode::PrimalReplicator &&
      regularizer != Regularizer::Entropic)
    throw std::invalid_argument(
        "IntegratorConfig: primal replicator mode requires the entropic "
        "regularizer");
}

namespace {

// Flat-state integrator for one trajectory. State layout per mode:
//   DualFtrl          [x_dual | y_dual | z_dual]   (3m)
//   PrimalReplicator  [x | y | z]                  (3m)
//   TwoActionReduced  [x1, y1, z1]                 (3)
class Stepper {
 public:
  Stepper(const Profile& initial, const DerivedParams& game,
          const IntegratorConfig& cfg)
      : game_(game), cfg_(cfg), m_(initial.actions()) {
    cfg_.validate();
    if (cfg_.mode == IntegrationMode::TwoActionReduced && m_ != 2)
      throw std::invalid_argument("two-action mode requires m = 2");
    const bool needs_interior =
        cfg_.regularizer == Regularizer::Entropic ||
        cfg_.mode == IntegrationMode::PrimalReplicator;
    if (needs_interior)
      for (const Strategy* s : {&initial.x, &initial.y, &initial.z})
        for (int i = 0; i < m_; ++i)
          if ((*s)[i] < kEntropicFloor)
            throw std::invalid_argument(
                "simulate: entropic modes need initial components >= 1e-12");
    switch (cfg_.mode) {
      case IntegrationMode::DualFtrl:
        state_.resize(static_cast<size_t>(3 * m_));
        if (cfg_.regularizer == Regularizer::Entropic) {
          load(initial, [](double p) { return std::log(p); });
        } else {
          load(initial, [](double p) { return p; });
        }
        break;
      case IntegrationMode::PrimalReplicator:
        state_.resize(static_cast<size_t>(3 * m_));
        load(initial, [](double p) { return p; });
        break;
      case IntegrationMode::TwoActionReduced:
        state_ = {initial.x[0], initial.y[0], initial.z[0]};
        break;
    }
    const size_t n = state_.size();
    k1_.resize(n); k2_.resize(n); k3_.resize(n); k4_.resize(n); tmp_.resize(n);
    prim_.assign(static_cast<size_t>(3 * m_), 0.0);
  }

  void step(double h) {
    const size_t n = state_.size();
    deriv(state_, k1_);
    for (size_t i = 0; i < n; ++i) tmp_[i] = state_[i] + 0.5 * h * k1_[i];
    deriv(tmp_, k2_);
    for (size_t i = 0; i < n; ++i) tmp_[i] = state_[i] + 0.5 * h * k2_[i];
    deriv(tmp_, k3_);
    for (size_t i = 0; i < n; ++i) tmp_[i] = state_[i] + h * k3_[i];
    deriv(tmp_, k4_);
    for (size_t i = 0; i < n; ++i)
      state_[i] += (h / 6.0) * (k1_[i] + 2.0 * (k2_[i] + k3_[i]) + k4_[i]);
    renormalize();
  }

  bool finite() const {
    return std::all_of(state_.begin(), state_.end(),
                       [](double v) { return std::isfinite(v); });
  }

  bool guard_tripped() const {
    if (cfg_.mode != IntegrationMode::DualFtrl) return false;
    for (double v : state_)
      if (std::abs(v) > cfg_.dual_magnitude_guard) return true;
    return false;
  }

  // Primal probabilities of all three players for the current state.
  void primal(std::array<std::vector<double>, 3>& out) {
    refresh_primal(state_);
    for (int p = 0; p < 3; ++p)
      out[static_cast<size_t>(p)].assign(
          prim_.begin() + p * m_, prim_.begin() + (p + 1) * m_);
  }

  // Dual representation for G: the state itself in dual mode, logs of the
  // primal in entropic primal modes, the primal itself in the Euclidean
  // two-action mode (a simplex point projects to itself). Exact zeros from
  // post-step clamping are floored before the log so that G stays finite.
  void duals(std::array<std::vector<double>, 3>& out) {
    if (cfg_.mode == IntegrationMode::DualFtrl) {
      for (int p = 0; p < 3; ++p)
        out[static_cast<size_t>(p)].assign(
            state_.begin() + p * m_, state_.begin() + (p + 1) * m_);
      return;
    }
    refresh_primal(state_);
    for (int p = 0; p < 3; ++p) {
      auto& d = out[static_cast<size_t>(p)];
      d.assign(prim_.begin() + p * m_, prim_.begin() + (p + 1) * m_);
      if (cfg_.regularizer == Regularizer::Entropic)
        for (double& v : d) v = std::log(std::max(v, 1e-300));
    }
  }

  const std::vector<double>& raw_state() const { return state_; }

  void set_raw_state(std::vector<double> s) {
    if (s.size() != state_.size())
      throw std::invalid_argument("set_raw_state: size mismatch");
    state_ = std::move(s);
  }

 private:
  template <typename F>
  void load(const Profile& initial, F&& f) {
    for (int i = 0; i < m_; ++i) {
      state_[static_cast<size_t>(i)] = f(initial.x[i]);
      state_[static_cast<size_t>(m_ + i)] = f(initial.y[i]);
      state_[static_cast<size_t>(2 * m_ + i)] = f(initial.z[i]);
    }
  }

  void refresh_primal(std::span<const double> s) {
    switch (cfg_.mode) {
      case IntegrationMode::DualFtrl:
        for (int p = 0; p < 3; ++p) {
          auto in = s.subspan(static_cast<size_t>(p * m_),
                              static_cast<size_t>(m_));
          auto out = std::span<double>(prim_).subspan(
              static_cast<size_t>(p * m_), static_cast<size_t>(m_));
          if (cfg_.regularizer == Regularizer::Entropic)
            softmax_into(in, out);
          else
            project_simplex_into(in, out, sort_scratch_);
        }
        break;
      case IntegrationMode::PrimalReplicator:
        std::copy(s.begin(), s.end(), prim_.begin());
        break;
      case IntegrationMode::TwoActionReduced:
        for (int p = 0; p < 3; ++p) {
          prim_[static_cast<size_t>(2 * p)] = s[static_cast<size_t>(p)];
          prim_[static_cast<size_t>(2 * p + 1)] =
              1.0 - s[static_cast<size_t>(p)];
        }
        break;
    }
  }

  void deriv(std::span<const double> s, std::span<double> out) {
    if (cfg_.mode == IntegrationMode::TwoActionReduced) {
      const auto v = two_action_rhs({s[0], s[1], s[2]}, game_,
                                    cfg_.regularizer);
      out[0] = v[0]; out[1] = v[1]; out[2] = v[2];
      return;
    }
    refresh_primal(s);
    const double* px = prim_.data();
    const double* py = prim_.data() + m_;
    const double* pz = prim_.data() + 2 * m_;
    for (int i = 0; i < m_; ++i) {
      out[static_cast<size_t>(i)] = gradient_component(py[i], pz[i], game_);
      out[static_cast<size_t>(m_ + i)] =
          gradient_component(pz[i], px[i], game_);
      out[static_cast<size_t>(2 * m_ + i)] =
          gradient_component(px[i], py[i], game_);
    }
    if (cfg_.mode == IntegrationMode::PrimalReplicator) {
      for (int p = 0; p < 3; ++p) {
        auto own = s.subspan(static_cast<size_t>(p * m_),
                             static_cast<size_t>(m_));
        auto o = out.subspan(static_cast<size_t>(p * m_),
                             static_cast<size_t>(m_));
        replicator_into(own, o, o);
      }
    }
  }

  void renormalize() {
    if (cfg_.mode == IntegrationMode::PrimalReplicator) {
      for (int p = 0; p < 3; ++p) {
        double sum = 0.0;
        for (int i = 0; i < m_; ++i) {
          double& v = state_[static_cast<size_t>(p * m_ + i)];
          if (v < 0.0) v = 0.0;
          sum += v;
        }
        for (int i = 0; i < m_; ++i)
          state_[static_cast<size_t>(p * m_ + i)] /= sum;
      }
    } else if (cfg_.mode == IntegrationMode::TwoActionReduced) {
      for (double& v : state_) v = std::clamp(v, 0.0, 1.0);
    }
  }

  DerivedParams game_;
  IntegratorConfig cfg_;
  int m_;
  std::vector<double> state_, k1_, k2_, k3_, k4_, tmp_, prim_, sort_scratch_;
};

double sync_sum(const std::array<std::vector<double>, 3>& prim) {
  double s = 0.0;
  for (size_t i = 0; i < prim[0].size(); ++i)
    s += prim[0][i] * prim[1][i] * prim[2][i];
  return s;
}

double conjugate_divergence(const std::array<std::vector<double>, 3>& duals,
                            Regularizer reg) {
  double g = 0.0;
  for (const auto& d : duals) {
    const double mean =
        std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    g += conjugate_value(d, reg) - mean;
  }
  return g;
}

}  // namespace

LearnerState make_initial_state(const Profile& initial,
                                const IntegratorConfig& config) {
  Stepper stepper(initial, DerivedParams{}, config);
  std::array<std::vector<double>, 3> d;
  stepper.duals(d);
  LearnerState st{PlayerVectors{d[0], d[1], d[2]}, initial, 0.0};
  return st;
}

LearnerState rk4_step(const LearnerState& state, double h,
                      const DerivedParams& game,
                      const IntegratorConfig& config) {
  if (!(h > 0.0)) throw std::invalid_argument("rk4_step: h <= 0");
  // Dual mode resumes from the exact dual vector, not its primal image; the
  // stepper is seeded with a uniform profile so that states already pinned
  // near a vertex pass construction.
  const bool dual = config.mode == IntegrationMode::DualFtrl;
  Stepper stepper(dual ? Profile::symmetric(
                             Strategy::uniform(state.primal.actions()))
                       : state.primal,
                  game, config);
  if (dual) {
    std::vector<double> raw;
    raw.reserve(state.duals.x.size() * 3);
    raw.insert(raw.end(), state.duals.x.begin(), state.duals.x.end());
    raw.insert(raw.end(), state.duals.y.begin(), state.duals.y.end());
    raw.insert(raw.end(), state.duals.z.begin(), state.duals.z.end());
    stepper.set_raw_state(std::move(raw));
  }
  stepper.step(h);
  if (!stepper.finite())
    throw std::runtime_error("rk4_step: state became non-finite");
  std::array<std::vector<double>, 3> prim, duals;
  stepper.primal(prim);
  stepper.duals(duals);
  Profile p{Strategy(prim[0]), Strategy(prim[1]), Strategy(prim[2])};
  return LearnerState{PlayerVectors{duals[0], duals[1], duals[2]},
                      std::move(p), state.t + h};
}

Trajectory simulate(const Profile& initial, const DerivedParams& game,
                    const IntegratorConfig& config) {
  Stepper stepper(initial, game, config);
  Trajectory traj(config, game, initial);
  const long long nsteps =
      std::max(1LL, std::llround(config.horizon / config.step));
  traj.samples.reserve(
      static_cast<size_t>(nsteps / config.record_every + 2));
  std::array<std::vector<double>, 3> prim, duals;
  for (long long k = 0;; ++k) {
    const bool last = (k == nsteps);
    if (last || k % config.record_every == 0) {
      stepper.primal(prim);
      stepper.duals(duals);
      const int m = static_cast<int>(prim[0].size());
      traj.samples.push_back(TrajectorySample{
          k * config.step,
          Profile(Strategy(prim[0]), Strategy(prim[1]), Strategy(prim[2])),
          sync_sum(prim) - 1.0 / (m * m),
          conjugate_divergence(duals, config.regularizer)});
    }
    if (last) break;
    stepper.step(config.step);
    if (!stepper.finite()) {
      traj.blew_up = true;
      break;
    }
    if (stepper.guard_tripped()) {
      traj.truncated = true;
      break;
    }
  }
  return traj;
}

}  // namespace m3ma
