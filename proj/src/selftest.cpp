#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include "m3ma/diagnostics.hpp"
#include "m3ma/dynamics.hpp"
#include "m3ma/equilibrium.hpp"
#include "m3ma/experiment.hpp"
#include "m3ma/sampling.hpp"
#include "m3ma/verifier.hpp"

// Identity suites: executable forms of the proven statements (the sign of
// V-dot, the G-dot identity, the V bounds, the two-action reduction, the
// conserved quantities at alpha = 0, and agreement of the two equilibrium
// enumeration routes). One PASS/FAIL line per suite, deterministic per seed.

namespace m3ma {

namespace {

struct SuiteRunner {
  std::ostream& os;
  bool all_ok = true;

  void report(const char* name, bool ok, const std::string& detail = "") {
    os << (ok ? "PASS " : "FAIL ") << name;
    if (!ok && !detail.empty()) os << ": " << detail;
    os << "\n";
    all_ok &= ok;
  }
};

std::vector<double> random_dual(Rng& rng, int m) {
  std::vector<double> d(static_cast<size_t>(m));
  for (double& v : d) v = rng.uniform(-8.0, 8.0);
  return d;
}

double reg_h(const std::vector<double>& p, Regularizer reg) {
  double h = 0.0;
  for (double v : p)
    h += reg == Regularizer::Entropic ? (v > 0.0 ? v * std::log(v) : 0.0)
                                      : 0.5 * v * v;
  return h;
}

bool suite_mirror_optimality(Rng& rng, std::string& detail) {
  for (int trial = 0; trial < 10000; ++trial) {
    const int m = 2 + trial % 4;
    const std::vector<double> d = random_dual(rng, m);
    for (Regularizer reg : {Regularizer::Entropic, Regularizer::Euclidean}) {
      const std::vector<double> q = mirror_map(d, reg);
      double obj_q = -reg_h(q, reg);
      for (int i = 0; i < m; ++i) obj_q += d[static_cast<size_t>(i)] * q[static_cast<size_t>(i)];
      const double conj = conjugate_value(d, reg);
      if (std::abs(conj - obj_q) > 1e-9) {
        detail = "conjugate disagrees with mirror objective";
        return false;
      }
      for (int probe = 0; probe < 100; ++probe) {
        const std::vector<double> p = dirichlet(rng, m, 0.0);
        double obj_p = -reg_h(p, reg);
        for (int i = 0; i < m; ++i) obj_p += d[static_cast<size_t>(i)] * p[static_cast<size_t>(i)];
        if (obj_p > obj_q + 1e-10) {
          detail = "mirror image beaten by a probe point";
          return false;
        }
      }
    }
  }
  return true;
}

bool suite_shift_invariance(Rng& rng, std::string& detail) {
  // dyadic duals + dyadic shifts: the additions are exact, so the entropic
  // image must be bit-identical
  for (int trial = 0; trial < 2000; ++trial) {
    const int m = 2 + trial % 4;
    std::vector<double> d(static_cast<size_t>(m));
    for (double& v : d) v = rng.uniform_int(-16, 16) * 0.25;
    for (double kappa : {0.5, 1.0, -2.0, 4.0}) {
      std::vector<double> shifted = d;
      for (double& v : shifted) v += kappa;
      if (mirror_map(d, Regularizer::Entropic) !=
          mirror_map(shifted, Regularizer::Entropic)) {
        detail = "entropic image not exactly shift-invariant";
        return false;
      }
      const std::vector<double> a = mirror_map(d, Regularizer::Euclidean);
      const std::vector<double> b = mirror_map(shifted, Regularizer::Euclidean);
      for (int i = 0; i < m; ++i)
        if (std::abs(a[static_cast<size_t>(i)] - b[static_cast<size_t>(i)]) > 1e-12) {
          detail = "euclidean image moved more than 1e-12 under a shift";
          return false;
        }
      // conjugate shifts additively by kappa
      if (std::abs(conjugate_value(shifted, Regularizer::Entropic) -
                   conjugate_value(d, Regularizer::Entropic) - kappa) > 1e-12) {
        detail = "entropic conjugate shift not additive";
        return false;
      }
    }
  }
  return true;
}

Strategy random_supported_strategy(Rng& rng, int m) {
  // random support mask, then a flat Dirichlet on the support
  std::vector<double> p(static_cast<size_t>(m), 0.0);
  int support = 0;
  for (int i = 0; i < m; ++i)
    if (rng.uniform() < 0.6) ++support;
  support = std::max(1, support);
  std::vector<int> idx(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) idx[static_cast<size_t>(i)] = i;
  for (int i = m - 1; i > 0; --i)
    std::swap(idx[static_cast<size_t>(i)],
              idx[static_cast<size_t>(rng.uniform_int(0, i))]);
  const std::vector<double> w = dirichlet(rng, std::max(2, support), 0.0);
  for (int s = 0; s < support; ++s)
    p[static_cast<size_t>(idx[static_cast<size_t>(s)])] =
        support == 1 ? 1.0 : w[static_cast<size_t>(s)];
  double sum = 0.0;
  for (double v : p) sum += v;
  for (double& v : p) v /= sum;
  return Strategy(std::move(p));
}

bool suite_stationarity_vs_gain(Rng& rng, std::string& detail) {
  for (int trial = 0; trial < 10000; ++trial) {
    const int m = 2 + trial % 4;
    const DerivedParams game{rng.uniform(-0.4, 0.4), 2.0,
                             rng.uniform(-0.5, 0.5), 0.0};
    const Strategy s = random_supported_strategy(rng, m);
    const bool via_gain = is_epsilon_nash(Profile::symmetric(s), game, 1e-9);
    const bool via_stationarity = stationarity_check(s, game, 1e-9).is_nash;
    if (via_gain != via_stationarity) {
      detail = "gain and stationarity verdicts disagree";
      return false;
    }
  }
  return true;
}

bool suite_sync_monotonicity(Rng& rng, std::string& detail) {
  for (int m : {2, 3, 4, 5}) {
    for (double alpha : {0.1, -0.1}) {
      // gamma = 0 for m > 2: the closed form is the flow derivative only for
      // competition-neutral games; for m = 2 any gamma works
      const double gamma = m == 2 ? rng.uniform(-0.5, 0.5) : 0.0;
      const DerivedParams game{alpha, 2.0, gamma, 0.0};
      for (int trial = 0; trial < 200; ++trial) {
        const Profile p = random_interior_profile(rng, m);
        const double vd = v_dot_analytic(p, game, Regularizer::Entropic);
        if (!(vd * alpha > 0.0)) {
          detail = "sign(V-dot) != sign(alpha) at a random interior profile";
          return false;
        }
      }
      // finite differences along a short trajectory
      IntegratorConfig ic;
      ic.step = 0.02;
      ic.horizon = 4.0;
      ic.mode = IntegrationMode::DualFtrl;
      ic.regularizer = Regularizer::Entropic;
      const Trajectory traj = simulate(random_interior_profile(rng, m), game, ic);
      for (size_t k = 1; k + 1 < traj.samples.size(); ++k) {
        const double fd =
            (traj.samples[k + 1].V - traj.samples[k - 1].V) / (2.0 * ic.step);
        const double vd =
            v_dot_analytic(traj.samples[k].profile, game, Regularizer::Entropic);
        if (std::abs(fd - vd) > std::max(1e-6, 1e-3 * std::abs(vd))) {
          detail = "finite difference disagrees with the closed form";
          return false;
        }
      }
    }
  }
  return true;
}

bool suite_g_identity(Rng& rng, std::string& detail) {
  for (int trial = 0; trial < 10000; ++trial) {
    const DerivedParams game{rng.uniform(-0.4, 0.4), rng.uniform(1.0, 3.0),
                             rng.uniform(-0.5, 0.5), 0.0};
    const Profile p = random_interior_profile(rng, 2);
    const double gd = g_dot_analytic(p, game);
    if (std::abs(gd - 2.0 * game.alpha * sync_V(p)) > 1e-12) {
      detail = "G-dot != 2 alpha V at m = 2";
      return false;
    }
    // beta cancels by cyclic symmetry
    DerivedParams other = game;
    other.beta = game.beta + 1.0;
    if (std::abs(g_dot_analytic(p, other) - gd) > 1e-12) {
      detail = "G-dot depends on beta";
      return false;
    }
  }
  return true;
}

bool suite_sync_bounds(Rng& rng, std::string& detail) {
  for (int trial = 0; trial < 100000; ++trial) {
    const int m = 2 + trial % 4;
    const Profile p = random_interior_profile(rng, m, 0.0);
    const double v = sync_V(p);
    const double lo = -1.0 / (m * m), hi = 1.0 - 1.0 / (m * m);
    if (v < lo - 1e-12 || v > hi + 1e-12) {
      detail = "V outside its range";
      return false;
    }
  }
  for (int m : {2, 3, 4}) {
    const double hi = 1.0 - 1.0 / (m * m);
    for (int i = 0; i < m; ++i) {
      if (std::abs(sync_V(Profile::symmetric(Strategy::pure(m, i))) - hi) >
          1e-15) {
        detail = "maximum not attained at a symmetric pure profile";
        return false;
      }
    }
    // mismatched pure profiles hit the minimum (every action has a zero)
    if (m >= 3) {
      const Profile p(Strategy::pure(m, 0), Strategy::pure(m, 1),
                      Strategy::pure(m, 2));
      if (std::abs(sync_V(p) + 1.0 / (m * m)) > 1e-15) {
        detail = "minimum not attained at mismatched pure profiles";
        return false;
      }
    }
    // a profile with a zero-free action stays above the minimum
    const Profile q = Profile::symmetric(Strategy::uniform(m));
    if (!(sync_V(q) > -1.0 / (m * m))) {
      detail = "uniform profile not above the minimum";
      return false;
    }
  }
  return true;
}

bool suite_two_action_reduction(Rng& rng, std::string& detail) {
  for (int trial = 0; trial < 5000; ++trial) {
    const DerivedParams game{rng.uniform(-0.4, 0.4), 2.0,
                             rng.uniform(-0.5, 0.5), 0.0};
    const Profile p = random_interior_profile(rng, 2);
    const PlayerVectors rep = replicator_rhs(p, game);
    const auto two = two_action_rhs({p.x[0], p.y[0], p.z[0]}, game,
                                    Regularizer::Entropic);
    if (std::abs(rep.x[0] - two[0]) > 1e-14 ||
        std::abs(rep.y[0] - two[1]) > 1e-14 ||
        std::abs(rep.z[0] - two[2]) > 1e-14) {
      detail = "replicator and reduced fields disagree at m = 2";
      return false;
    }
    // the reduced field never reads gamma
    DerivedParams other = game;
    other.gamma = game.gamma + 0.3;
    const auto two2 = two_action_rhs({p.x[0], p.y[0], p.z[0]}, other,
                                     Regularizer::Entropic);
    if (std::memcmp(two.data(), two2.data(), sizeof(two)) != 0) {
      detail = "reduced field depends on gamma";
      return false;
    }
  }
  return true;
}

bool suite_conservation(Rng& rng, std::string& detail) {
  IntegratorConfig ic;
  ic.step = 0.02;
  ic.horizon = 100.0;
  ic.mode = IntegrationMode::DualFtrl;
  for (Regularizer reg : {Regularizer::Entropic, Regularizer::Euclidean}) {
    ic.regularizer = reg;
    const DerivedParams game{0.0, 2.0, 0.0, 0.0};
    for (int k = 0; k < 5; ++k) {
      Profile init = [&]() {
        if (reg == Regularizer::Entropic) return random_interior_profile(rng, 2);
        // keep the Euclidean rotation strictly inside the cube; conservation
        // is an interior statement
        while (true) {
          const double x1 = rng.uniform(), y1 = rng.uniform(),
                       z1 = rng.uniform();
          const double s = (x1 + y1 + z1) / 3.0 - 0.5;
          const double r2 = (x1 - 0.5 - s) * (x1 - 0.5 - s) +
                            (y1 - 0.5 - s) * (y1 - 0.5 - s) +
                            (z1 - 0.5 - s) * (z1 - 0.5 - s);
          if (std::abs(s) + std::sqrt(2.0 / 3.0 * r2) < 0.47)
            return Profile(Strategy({x1, 1.0 - x1}), Strategy({y1, 1.0 - y1}),
                           Strategy({z1, 1.0 - z1}));
        }
      }();
      const Trajectory traj = simulate(init, game, ic);
      for (const TrajectorySample& s : traj.samples) {
        if (std::abs(s.V - traj.samples.front().V) > 1e-6) {
          detail = "V not conserved at alpha = 0";
          return false;
        }
        if (std::abs(s.G - traj.samples.front().G) > 1e-5) {
          detail = "G not conserved at alpha = 0";
          return false;
        }
      }
    }
  }
  return true;
}

bool points_equal(const std::vector<Strategy>& a,
                  const std::vector<Strategy>& b) {
  if (a.size() != b.size()) return false;
  std::set<std::vector<double>> sa, sb;
  for (const Strategy& s : a) sa.insert(s.probs());
  for (const Strategy& s : b) sb.insert(s.probs());
  return sa == sb;
}

bool suite_regime_table_agreement(Rng& rng, std::string& detail) {
  std::vector<std::pair<double, double>> params = {
      {-0.1, -0.1}, {0.1, -0.3}, {0.1, 0.2}, {-0.3, 0.2}};
  for (int trial = 0; trial < 200; ++trial)
    params.emplace_back(rng.uniform(-0.45, 0.45), rng.uniform(-0.6, 0.6));
  for (int m : {2, 3, 4, 5}) {
    for (const auto& [alpha, gamma] : params) {
      if (alpha == 0.0 || gamma == 0.0 || alpha == gamma) continue;
      const EquilibriumSet unified = enumerate_equilibria(m, alpha, gamma);
      // skip the degenerate lines outside the case split's coverage
      if (!unified.notes.empty()) continue;
      const EquilibriumSet table =
          enumerate_equilibria_casewise(m, alpha, gamma);
      if (!points_equal(expand_points(unified, m), expand_points(table, m))) {
        detail = "unified and casewise enumerations disagree";
        return false;
      }
    }
  }
  return true;
}

bool suite_offset_invariance(Rng& rng, std::string& detail) {
  IntegratorConfig ic;
  ic.step = 0.02;
  ic.horizon = 50.0;
  ic.mode = IntegrationMode::DualFtrl;
  ic.regularizer = Regularizer::Entropic;
  const Profile init = random_interior_profile(rng, 2);
  const Trajectory t0 = simulate(init, {0.1, 2.0, -0.3, 0.0}, ic);
  const Trajectory t5 = simulate(init, {0.1, 2.0, -0.3, 5.0}, ic);
  for (size_t k = 0; k < t0.samples.size(); ++k)
    for (int i = 0; i < 2; ++i)
      if (std::abs(t0.samples[k].profile.x[i] - t5.samples[k].profile.x[i]) >
          1e-9) {
        detail = "offset changed the primal flow";
        return false;
      }
  return true;
}

bool suite_fixed_points(Rng& rng, std::string& detail) {
  (void)rng;
  for (int m : {2, 3, 4}) {
    const DerivedParams pos{0.1, 2.0, -0.2, 0.0};
    const Profile uni = Profile::symmetric(Strategy::uniform(m));
    const PlayerVectors rep = replicator_rhs(uni, pos);
    const PlayerVectors ga = gradient_ascent_rhs(uni, pos);
    for (const auto* v : {&rep.x, &rep.y, &rep.z, &ga.x, &ga.y, &ga.z})
      for (double d : *v)
        if (std::abs(d) > 1e-14) {
          detail = "uniform profile not stationary";
          return false;
        }
    // pure symmetric profiles are stationary for the replicator field
    const Profile pure = Profile::symmetric(Strategy::pure(m, 0));
    const PlayerVectors rp = replicator_rhs(pure, pos);
    for (const auto* v : {&rp.x, &rp.y, &rp.z})
      for (double d : *v)
        if (std::abs(d) > 1e-14) {
          detail = "pure symmetric profile not stationary";
          return false;
        }
  }
  const auto two =
      two_action_rhs({0.5, 0.5, 0.5}, {0.3, 2.0, 0.1, 0.0},
                     Regularizer::Entropic);
  for (double d : two)
    if (std::abs(d) > 1e-14) {
      detail = "uniform point not stationary in the reduced field";
      return false;
    }
  return true;
}

bool suite_simplex_preservation(Rng& rng, std::string& detail) {
  IntegratorConfig ic;
  ic.step = 0.02;
  ic.horizon = 60.0;
  for (auto [mode, reg] :
       {std::pair{IntegrationMode::DualFtrl, Regularizer::Entropic},
        std::pair{IntegrationMode::DualFtrl, Regularizer::Euclidean},
        std::pair{IntegrationMode::PrimalReplicator, Regularizer::Entropic},
        std::pair{IntegrationMode::TwoActionReduced, Regularizer::Euclidean}}) {
    ic.mode = mode;
    ic.regularizer = reg;
    const int m = mode == IntegrationMode::TwoActionReduced ? 2 : 3;
    if (mode == IntegrationMode::TwoActionReduced ||
        reg == Regularizer::Euclidean)
      ic.horizon = 60.0;
    const Trajectory traj =
        simulate(random_interior_profile(rng, m), {0.1, 2.0, 0.2, 0.0}, ic);
    for (const TrajectorySample& s : traj.samples)
      for (const Strategy* st : {&s.profile.x, &s.profile.y, &s.profile.z}) {
        double sum = 0.0;
        for (int i = 0; i < st->size(); ++i) {
          if ((*st)[i] < -1e-12) {
            detail = "negative probability recorded";
            return false;
          }
          sum += (*st)[i];
        }
        if (std::abs(sum - 1.0) > 1e-9) {
          detail = "recorded profile off the simplex";
          return false;
        }
      }
  }
  return true;
}

}  // namespace

bool run_selftest(std::uint64_t seed, std::ostream& os) {
  SuiteRunner runner{os};
  struct Suite {
    const char* name;
    bool (*fn)(Rng&, std::string&);
  };
  const Suite suites[] = {
      {"mirror_map_optimality", suite_mirror_optimality},
      {"mirror_map_shift_invariance", suite_shift_invariance},
      {"stationarity_vs_gain", suite_stationarity_vs_gain},
      {"sync_monotonicity", suite_sync_monotonicity},
      {"g_dot_identity", suite_g_identity},
      {"sync_bounds", suite_sync_bounds},
      {"two_action_reduction", suite_two_action_reduction},
      {"conservation_at_alpha_zero", suite_conservation},
      {"regime_table_agreement", suite_regime_table_agreement},
      {"offset_invariance", suite_offset_invariance},
      {"fixed_points", suite_fixed_points},
      {"simplex_preservation", suite_simplex_preservation},
  };
  auto name_hash = [](const char* name) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char* c = name; *c; ++c) {
      h ^= static_cast<unsigned char>(*c);
      h *= 0x100000001b3ull;
    }
    return h;
  };
  for (const Suite& s : suites) {
    Rng rng(seed ^ name_hash(s.name));
    std::string detail;
    bool ok = false;
    try {
      ok = s.fn(rng, detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    runner.report(s.name, ok, detail);
  }
  os << (runner.all_ok ? "selftest: all suites passed\n"
                       : "selftest: FAILURES present\n");
  return runner.all_ok;
}

}  // namespace m3ma
