#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "m3ma/diagnostics.hpp"
#include "m3ma/sampling.hpp"

using namespace m3ma;

TEST_CASE("sync measure V") {
  CHECK(sync_V(Profile::symmetric(Strategy::uniform(2))) ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK(sync_V(Profile::symmetric(Strategy::uniform(5))) ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK(sync_V(Profile::symmetric(Strategy::pure(2, 0))) == doctest::Approx(0.75));
  CHECK(sync_V(Profile(Strategy::pure(2, 0), Strategy::pure(2, 0),
                       Strategy::pure(2, 1))) == doctest::Approx(-0.25));
  // range over random profiles
  Rng rng(107);
  for (int trial = 0; trial < 20000; ++trial) {
    const int m = 2 + trial % 4;
    const double v = sync_V(random_interior_profile(rng, m, 0.0));
    CHECK(v >= -1.0 / (m * m) - 1e-12);
    CHECK(v <= 1.0 - 1.0 / (m * m) + 1e-12);
  }
}

TEST_CASE("conjugate divergence G") {
  PlayerVectors duals = PlayerVectors::zeros(2);
  CHECK(divergence_G(duals, Regularizer::Entropic, 2) ==
        doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(divergence_G(duals, Regularizer::Euclidean, 2) ==
        doctest::Approx(-0.75).epsilon(1e-14));
  // per-player shifts drop out
  Rng rng(109);
  for (int trial = 0; trial < 300; ++trial) {
    PlayerVectors d = PlayerVectors::zeros(3);
    for (auto* v : {&d.x, &d.y, &d.z})
      for (double& c : *v) c = rng.uniform(-4.0, 4.0);
    PlayerVectors shifted = d;
    const double kx = rng.uniform(-2.0, 2.0), ky = rng.uniform(-2.0, 2.0),
                 kz = rng.uniform(-2.0, 2.0);
    for (double& c : shifted.x) c += kx;
    for (double& c : shifted.y) c += ky;
    for (double& c : shifted.z) c += kz;
    for (Regularizer reg : {Regularizer::Entropic, Regularizer::Euclidean})
      CHECK(divergence_G(shifted, reg, 3) ==
            doctest::Approx(divergence_G(d, reg, 3)).epsilon(1e-12));
  }
  // recentering constant: G at the uniform-dual point equals the offset
  CHECK(g_uniform_offset(Regularizer::Entropic, 2) ==
        doctest::Approx(3.0 * std::log(2.0)));
  CHECK(g_uniform_offset(Regularizer::Euclidean, 2) == doctest::Approx(-0.75));
  CHECK(divergence_G(PlayerVectors::zeros(4), Regularizer::Euclidean, 4) ==
        doctest::Approx(g_uniform_offset(Regularizer::Euclidean, 4))
            .epsilon(1e-14));
}

TEST_CASE("time derivative of V") {
  SUBCASE("vanishes at the uniform profile") {
    for (int m : {2, 3, 4})
      CHECK(std::abs(v_dot_analytic(Profile::symmetric(Strategy::uniform(m)),
                                    {0.1, 2.0, 0.0, 0.0},
                                    Regularizer::Entropic)) <= 1e-16);
  }
  SUBCASE("two-action closed form by hand") {
    const Strategy s({0.6, 0.4});
    const double v = v_dot_analytic(Profile::symmetric(s), {0.1, 2.0, 0.0, 0.0},
                                    Regularizer::Entropic);
    CHECK(v == doctest::Approx(0.00288).epsilon(1e-12));
    // euclidean weight is 1/2: 0.1 * 3 * 0.5 * 0.04
    const double ve = v_dot_analytic(Profile::symmetric(s),
                                     {0.1, 2.0, 0.0, 0.0},
                                     Regularizer::Euclidean);
    CHECK(ve == doctest::Approx(0.006).epsilon(1e-12));
  }
  SUBCASE("sign equals the sign of the sync force") {
    Rng rng(113);
    for (int trial = 0; trial < 3000; ++trial) {
      const int m = 2 + trial % 4;
      const double alpha = trial % 2 ? 0.2 : -0.2;
      const Profile p = random_interior_profile(rng, m);
      const double v =
          v_dot_analytic(p, {alpha, 2.0, 0.0, 0.0}, Regularizer::Entropic);
      CHECK(v * alpha > 0.0);
    }
  }
  SUBCASE("no Euclidean closed form beyond two actions") {
    CHECK_THROWS_AS(v_dot_analytic(Profile::symmetric(Strategy::uniform(3)),
                                   {0.1, 2.0, 0.0, 0.0}, Regularizer::Euclidean),
                    std::domain_error);
  }
  SUBCASE("the variance and reduced forms agree at m = 2") {
    Rng rng(127);
    for (int trial = 0; trial < 2000; ++trial) {
      const Profile p = random_interior_profile(rng, 2);
      const DerivedParams g{rng.uniform(-0.4, 0.4), 2.0, 0.0, 0.0};
      // variance form computed directly
      double var_total = 0.0;
      const Strategy* pl[3] = {&p.x, &p.y, &p.z};
      for (int c = 0; c < 3; ++c) {
        double e1 = 0.0, e2 = 0.0;
        for (int i = 0; i < 2; ++i) {
          const double prod = (*pl[(c + 1) % 3])[i] * (*pl[(c + 2) % 3])[i];
          e1 += (*pl[c])[i] * prod;
          e2 += (*pl[c])[i] * prod * prod;
        }
        var_total += e2 - e1 * e1;
      }
      CHECK(v_dot_analytic(p, g, Regularizer::Entropic) ==
            doctest::Approx(g.alpha * var_total).epsilon(1e-12));
    }
  }
}

TEST_CASE("time derivative of G") {
  SUBCASE("vanishes at the uniform profile") {
    for (int m : {2, 3, 5})
      CHECK(std::abs(g_dot_analytic(Profile::symmetric(Strategy::uniform(m)),
                                    {0.1, 2.0, 0.3, 0.0})) <= 1e-15);
  }
  SUBCASE("two-action identity with 2 alpha V") {
    const Strategy s({0.6, 0.4});
    CHECK(g_dot_analytic(Profile::symmetric(s), {0.1, 2.0, 0.0, 0.0}) ==
          doctest::Approx(0.006).epsilon(1e-12));
    Rng rng(131);
    for (int trial = 0; trial < 10000; ++trial) {
      const DerivedParams g{rng.uniform(-0.4, 0.4), rng.uniform(1.0, 3.0),
                            rng.uniform(-0.5, 0.5), 0.0};
      const Profile p = random_interior_profile(rng, 2);
      CHECK(std::abs(g_dot_analytic(p, g) - 2.0 * g.alpha * sync_V(p)) <=
            1e-12);
    }
  }
  SUBCASE("conserved when the sync force vanishes (m = 2)") {
    Rng rng(137);
    for (int trial = 0; trial < 1000; ++trial) {
      const Profile p = random_interior_profile(rng, 2);
      CHECK(std::abs(g_dot_analytic(p, {0.0, 2.0, rng.uniform(-0.5, 0.5),
                                        0.0})) <= 1e-13);
    }
  }
  SUBCASE("rotation force drops out for any action count") {
    Rng rng(139);
    for (int trial = 0; trial < 1000; ++trial) {
      const int m = 2 + trial % 4;
      const Profile p = random_interior_profile(rng, m);
      const double alpha = rng.uniform(-0.4, 0.4);
      const double gamma = rng.uniform(-0.5, 0.5);
      const double a = g_dot_analytic(p, {alpha, 1.3, gamma, 0.0});
      const double b = g_dot_analytic(p, {alpha, 2.9, gamma, 0.0});
      CHECK(std::abs(a - b) <= 1e-12);
    }
  }
  SUBCASE("cyclic rotation of the profile changes nothing") {
    Rng rng(149);
    for (int trial = 0; trial < 500; ++trial) {
      const int m = 2 + trial % 3;
      const Profile p = random_interior_profile(rng, m);
      const Profile rotated(p.y, p.z, p.x);
      const DerivedParams g{0.2, 2.0, -0.3, 0.0};
      CHECK(g_dot_analytic(p, g) ==
            doctest::Approx(g_dot_analytic(rotated, g)).epsilon(1e-12));
      CHECK(v_dot_analytic(p, g, Regularizer::Entropic) ==
            doctest::Approx(v_dot_analytic(rotated, g, Regularizer::Entropic))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("finite differences track the closed forms along trajectories") {
  Rng rng(151);
  IntegratorConfig cfg;
  cfg.step = 0.02;
  cfg.horizon = 6.0;
  for (int m : {2, 3, 4}) {
    const DerivedParams game{m == 2 ? -0.1 : 0.1, 2.0,
                             m == 2 ? -0.3 : 0.0, 0.0};
    const Trajectory traj = simulate(random_interior_profile(rng, m), game, cfg);
    for (size_t k = 1; k + 1 < traj.samples.size(); ++k) {
      const double fd_v =
          (traj.samples[k + 1].V - traj.samples[k - 1].V) / (2.0 * cfg.step);
      const double vd = v_dot_analytic(traj.samples[k].profile, game,
                                       Regularizer::Entropic);
      CHECK(std::abs(fd_v - vd) <= std::max(1e-6, 1e-3 * std::abs(vd)));
      const double fd_g =
          (traj.samples[k + 1].G - traj.samples[k - 1].G) / (2.0 * cfg.step);
      const double gd = g_dot_analytic(traj.samples[k].profile, game);
      CHECK(std::abs(fd_g - gd) <= std::max(1e-6, 1e-3 * std::abs(gd)));
    }
  }
}

TEST_CASE("trajectory classification") {
  IntegratorConfig cfg;
  cfg.step = 0.02;
  cfg.horizon = 800.0;
  cfg.record_every = 2;
  Rng rng(157);
  const Profile init = random_interior_profile(rng, 2);
  SUBCASE("sync regime") {
    const RegimeLabel l =
        classify_trajectory(simulate(init, {0.1, 2.0, 0.0, 0.0}, cfg));
    CHECK(l.tag == RegimeTag::Synchronizing);
    CHECK(l.evidence.terminal_sync >= 0.99);
  }
  SUBCASE("neutral regime cycles") {
    const RegimeLabel l =
        classify_trajectory(simulate(init, {0.0, 2.0, 0.0, 0.0}, cfg));
    CHECK(l.tag == RegimeTag::Cycling);
    CHECK(l.evidence.recurrence_score <= 1e-2);
  }
  SUBCASE("desync regime") {
    const RegimeLabel l =
        classify_trajectory(simulate(init, {-0.1, 2.0, 0.0, 0.0}, cfg));
    CHECK(l.tag == RegimeTag::Desynchronizing);
    CHECK(l.evidence.terminal_sync <= 0.01);
  }
  SUBCASE("too few samples") {
    IntegratorConfig tiny;
    tiny.horizon = 0.5;
    CHECK_THROWS_AS(
        classify_trajectory(simulate(init, {0.0, 2.0, 0.0, 0.0}, tiny)),
        std::invalid_argument);
  }
}

TEST_CASE("vertex itinerary follows the heteroclinic loop") {
  IntegratorConfig cfg;
  cfg.step = 0.02;
  cfg.horizon = 1200.0;
  cfg.record_every = 2;
  Rng rng(163);
  const Trajectory traj =
      simulate(random_interior_profile(rng, 2), {-0.1, 2.0, 0.0, 0.0}, cfg);
  const auto visits = vertex_itinerary(traj, cfg.horizon / 4.0);
  CHECK(visits.size() >= 4);
  CHECK(follows_six_cycle(visits, 3));
  // the matched corners never appear on the loop
  for (const auto& v : visits) {
    CHECK_FALSE((v == std::array<int, 3>{0, 0, 0}));
    CHECK_FALSE((v == std::array<int, 3>{1, 1, 1}));
  }
}

TEST_CASE("six-cycle checker rejects broken orders") {
  using V = std::array<int, 3>;
  CHECK(follows_six_cycle({V{0, 0, 1}, V{0, 1, 1}, V{0, 1, 0}, V{1, 1, 0}}, 3));
  CHECK_FALSE(follows_six_cycle({V{0, 0, 1}, V{0, 1, 0}}, 1));  // skipped a hop
  CHECK_FALSE(
      follows_six_cycle({V{0, 0, 1}, V{0, 1, 1}, V{0, 1, 0}}, 3));  // too short
  CHECK_FALSE(follows_six_cycle({V{0, 0, 0}, V{0, 0, 1}}, 1));  // off the loop
}
