#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "m3ma/equilibrium.hpp"
#include "m3ma/sampling.hpp"
#include "m3ma/verifier.hpp"

using namespace m3ma;

namespace {

double max_gain(const Strategy& s, double alpha, double gamma) {
  const DerivedParams game{alpha, std::abs(gamma) + 1.0, gamma, 0.0};
  const auto g = deviation_gain(Profile::symmetric(s), game);
  return std::max({g[0], g[1], g[2]});
}

}  // namespace

TEST_CASE("regime classification with first-match precedence") {
  CHECK(classify_regime(0.0, 0.0) == RegimeClass::Neutral);
  CHECK(classify_regime(-0.1, 0.0) == RegimeClass::BothNonpositive);
  CHECK(classify_regime(0.0, -0.2) == RegimeClass::BothNonpositive);
  CHECK(classify_regime(0.1, -0.3) == RegimeClass::AlphaPosGammaNeg);
  CHECK(classify_regime(0.1, 0.2) == RegimeClass::BothNonnegative);
  CHECK(classify_regime(0.1, 0.0) == RegimeClass::BothNonnegative);
  CHECK(classify_regime(0.0, 0.2) == RegimeClass::BothNonnegative);
  CHECK(classify_regime(-0.3, 0.2) == RegimeClass::GammaPosAlphaNeg);
}

TEST_CASE("extremum of the diagonal gradient") {
  CHECK(extremum_point(0.1, -0.3) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(extremum_point(-0.1, 0.1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(extremum_point(0.2, 0.2), std::domain_error);
}

TEST_CASE("double-root patterns") {
  SUBCASE("conflicting forces, support 3") {
    const auto pats = double_root_patterns(3, 0.1, -0.3);
    REQUIRE(pats.size() == 1);
    CHECK(pats[0].k == 1);
    CHECK(pats[0].x_plus == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pats[0].x_minus == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(f_tilde(pats[0].x_plus, 0.1, -0.3) ==
          doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(std::abs(f_tilde(pats[0].x_plus, 0.1, -0.3) -
                   f_tilde(pats[0].x_minus, 0.1, -0.3)) <= 1e-12);
  }
  SUBCASE("two actions never split") {
    CHECK(double_root_patterns(2, 0.1, -0.3).empty());
    CHECK(double_root_patterns(2, -0.3, 0.2).empty());
  }
  SUBCASE("aligned forces have no patterns") {
    CHECK(double_root_patterns(4, 0.1, 0.2).empty());
    CHECK(double_root_patterns(4, -0.1, -0.2).empty());
    CHECK(double_root_patterns(4, 0.0, -0.2).empty());
  }
  SUBCASE("support 4 with gamma winning") {
    const auto pats = double_root_patterns(4, -0.3, 0.2);
    REQUIRE(pats.size() == 1);
    CHECK(pats[0].k == 3);
    CHECK(pats[0].x_plus == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(pats[0].x_minus == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(pats[0].common_value(-0.3, 0.2) ==
          doctest::Approx(0.015).epsilon(1e-12));
    // mass balance: k x+ + (m-k) x- = 1
    CHECK(3 * pats[0].x_plus + pats[0].x_minus ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("pattern invariants hold over random conflicting parameters") {
    Rng rng(17);
    for (int trial = 0; trial < 2000; ++trial) {
      double alpha = rng.uniform(0.01, 0.45), gamma = rng.uniform(-0.6, -0.01);
      if (trial % 2) std::swap(alpha, gamma);  // other conflict orientation
      const int mp = rng.uniform_int(2, 7);
      for (const auto& p : double_root_patterns(mp, alpha, gamma)) {
        CHECK(p.x_minus > 0.0);
        CHECK(p.x_plus > p.x_minus);
        CHECK(p.x_plus < 1.0);
        CHECK(std::abs(p.k * p.x_plus + (mp - p.k) * p.x_minus - 1.0) <= 1e-12);
        CHECK(std::abs(f_tilde(p.x_plus, alpha, gamma) -
                       f_tilde(p.x_minus, alpha, gamma)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("enumerate_equilibria across the regimes") {
  SUBCASE("neutral game: whole simplex") {
    const EquilibriumSet set = enumerate_equilibria(3, 0.0, 0.0);
    CHECK(set.continuum);
    CHECK_THROWS_AS(expand_points(set, 3), std::invalid_argument);
  }
  SUBCASE("both forces nonpositive: uniform only") {
    const EquilibriumSet set = enumerate_equilibria(2, -0.1, 0.0);
    REQUIRE(set.families.size() == 1);
    CHECK(set.families[0].kind == EquilibriumFamily::Kind::Uniform);
    CHECK(set.families[0].support_size == 2);
    const auto pts = expand_points(set, 2);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0][0] == 0.5);
  }
  SUBCASE("sync wins over competition: pure + uniform + double roots") {
    const EquilibriumSet set = enumerate_equilibria(3, 0.1, -0.3);
    CHECK(set.contains_pure());
    CHECK(set.contains_uniform_support(3));
    CHECK_FALSE(set.contains_uniform_support(2));  // f_tilde(1/2) < 0
    const auto pts = expand_points(set, 3);
    CHECK(pts.size() == 7);  // 3 pure + 1 uniform + 3 double-root placements
    for (const Strategy& s : pts) CHECK(max_gain(s, 0.1, -0.3) <= 1e-9);
  }
  SUBCASE("both nonnegative: pure + all uniform supports") {
    const EquilibriumSet set = enumerate_equilibria(3, 0.1, 0.2);
    CHECK(set.contains_pure());
    CHECK(set.contains_uniform_support(2));
    CHECK(set.contains_uniform_support(3));
    const auto pts = expand_points(set, 3);
    CHECK(pts.size() == 7);  // 3 + 3 + 1
    for (const Strategy& s : pts) CHECK(max_gain(s, 0.1, 0.2) <= 1e-9);
  }
}

TEST_CASE("expand_points: orbits and exact dedupe") {
  SUBCASE("pure orbit") {
    EquilibriumSet set;
    set.families.push_back({EquilibriumFamily::Kind::Uniform, 1, {}});
    const auto pts = expand_points(set, 3);
    REQUIRE(pts.size() == 3);
    std::set<std::vector<double>> want = {
        {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
    for (const Strategy& s : pts) CHECK(want.count(s.probs()) == 1);
  }
  SUBCASE("uniform pair placements") {
    EquilibriumSet set;
    set.families.push_back({EquilibriumFamily::Kind::Uniform, 2, {}});
    CHECK(expand_points(set, 3).size() == 3);
  }
  SUBCASE("double-root orbit count") {
    EquilibriumSet set;
    DoubleRootPattern p{1, 0.5, 0.25, 3};
    set.families.push_back({EquilibriumFamily::Kind::DoubleRoots, 3, p});
    const auto pts = expand_points(set, 3);
    CHECK(pts.size() == 3);  // C(3,3) * C(3,1)
    for (const Strategy& s : pts) {
      double hi = 0, lo = 1;
      for (int i = 0; i < 3; ++i) {
        hi = std::max(hi, s[i]);
        lo = std::min(lo, s[i]);
      }
      CHECK(hi == doctest::Approx(0.5));
      CHECK(lo == doctest::Approx(0.25));
    }
  }
  SUBCASE("duplicate families collapse") {
    EquilibriumSet set;
    set.families.push_back({EquilibriumFamily::Kind::Uniform, 2, {}});
    set.families.push_back({EquilibriumFamily::Kind::Uniform, 2, {}});
    CHECK(expand_points(set, 4).size() == 6);
  }
}

TEST_CASE("always-uniform and pure-iff-nonnegative-sync") {
  Rng rng(23);
  for (int trial = 0; trial < 400; ++trial) {
    const double alpha = rng.uniform(-0.45, 0.45);
    const double gamma = rng.uniform(-0.6, 0.6);
    if (alpha == 0.0 && gamma == 0.0) continue;
    const int m = rng.uniform_int(2, 5);
    const EquilibriumSet set = enumerate_equilibria(m, alpha, gamma);
    CHECK(set.contains_uniform_support(m));
    CHECK(set.contains_pure() == (alpha >= 0.0));
  }
}

TEST_CASE("enumerated points are equilibria; grid finds nothing else") {
  const std::pair<double, double> params[] = {
      {-0.1, -0.1}, {0.1, -0.3}, {0.1, 0.2}, {-0.3, 0.2}};
  for (int m : {2, 3}) {
    for (const auto& [alpha, gamma] : params) {
      const DerivedParams game{alpha, 2.0, gamma, 0.0};
      const auto pts = expand_points(enumerate_equilibria(m, alpha, gamma), m);
      for (const Strategy& s : pts) CHECK(max_gain(s, alpha, gamma) <= 1e-9);
      // every near-Nash grid point sits within one grid step of the set
      const int d = 24;
      for (const Strategy& g : grid_oracle_symmetric(m, game, d)) {
        double best = 1.0;
        for (const Strategy& s : pts) {
          double dist = 0.0;
          for (int i = 0; i < m; ++i)
            dist = std::max(dist, std::abs(s[i] - g[i]));
          best = std::min(best, dist);
        }
        CHECK(best <= 1.0 / d + 1e-12);
      }
    }
  }
}

TEST_CASE("permutation equivariance of the expanded set") {
  const auto pts = expand_points(enumerate_equilibria(4, -0.3, 0.2), 4);
  std::set<std::vector<double>> set_pts;
  for (const Strategy& s : pts) set_pts.insert(s.probs());
  for (const Strategy& s : pts) {
    std::vector<double> rotated(s.probs());
    std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
    CHECK(set_pts.count(rotated) == 1);
  }
}

TEST_CASE("unified and casewise enumerations agree off the degenerate lines") {
  Rng rng(29);
  auto as_point_set = [](const EquilibriumSet& s, int m) {
    std::set<std::vector<double>> out;
    for (const Strategy& st : expand_points(s, m)) out.insert(st.probs());
    return out;
  };
  int checked = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const double alpha = rng.uniform(-0.45, 0.45);
    const double gamma = rng.uniform(-0.6, 0.6);
    if (alpha == 0.0 || gamma == 0.0 || alpha == gamma) continue;
    const int m = rng.uniform_int(2, 6);
    const EquilibriumSet unified = enumerate_equilibria(m, alpha, gamma);
    if (!unified.notes.empty()) continue;
    const EquilibriumSet table = enumerate_equilibria_casewise(m, alpha, gamma);
    CHECK(as_point_set(unified, m) == as_point_set(table, m));
    ++checked;
  }
  CHECK(checked > 400);
}

TEST_CASE("degenerate lines are flagged, and the sync=0 boundary keeps pure") {
  // alpha = 0, gamma < 0: the two-value continuum exists only at full
  // support m = 2; pure strategies are (weak) equilibria
  const EquilibriumSet two = enumerate_equilibria(2, 0.0, -0.3);
  CHECK_FALSE(two.notes.empty());
  CHECK(two.contains_pure());

  const EquilibriumSet three = enumerate_equilibria(3, 0.0, -0.3);
  CHECK(three.notes.empty());  // pair continua are not Nash below full support
  CHECK(three.contains_pure());
  CHECK(three.contains_uniform_support(3));
  CHECK_FALSE(three.contains_uniform_support(2));
  for (const Strategy& s : expand_points(three, 3))
    CHECK(max_gain(s, 0.0, -0.3) <= 1e-9);

  // alpha = 0, gamma > 0: pair continua exist on every 2-subset
  CHECK_FALSE(enumerate_equilibria(3, 0.0, 0.2).notes.empty());

  // conflict lines with support * x_ext == 1: m = 4, alpha = -gamma
  const EquilibriumSet four = enumerate_equilibria(4, 0.2, -0.2);
  CHECK_FALSE(four.notes.empty());
}

TEST_CASE("beta independence is structural") {
  // the enumeration API never takes beta; gains of enumerated points stay
  // zero under any feasible beta
  const auto pts = expand_points(enumerate_equilibria(3, 0.1, -0.3), 3);
  for (double beta : {1.0, 2.0, 7.5}) {
    const DerivedParams game{0.1, beta, -0.3, 0.0};
    for (const Strategy& s : pts) {
      const auto g = deviation_gain(Profile::symmetric(s), game);
      CHECK(std::max({g[0], g[1], g[2]}) <= 1e-9);
    }
  }
}
