#ifndef M3MA_VERIFIER_HPP
#define M3MA_VERIFIER_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "m3ma/game.hpp"

// Independent correctness oracle for equilibrium claims: exact best-response
// gains (the payoff is linear in the own strategy, so the best response is a
// vertex), stationarity of f_tilde on the support, and brute-force grid
// search over simplex profiles.

namespace m3ma {

struct StationarityReport {
  double common_value = 0.0;          // support mean of f_tilde
  double max_equality_violation = 0.0;
  double max_inequality_violation = 0.0;
  bool is_nash = false;
};

// Best-response gain for each of X, Y, Z:
//   gain = max_i f(opponent components) - sum_i own_i * f(...).
// All three <= tol iff the profile is an epsilon-Nash point.
std::array<double, 3> deviation_gain(const Profile& profile,
                                     const DerivedParams& game);

bool is_epsilon_nash(const Profile& profile, const DerivedParams& game,
                     double tol);

// Stationarity of a symmetric candidate (x = y = z = strategy): f_tilde must
// be constant on the support and 0 <= C must hold when zero entries exist.
StationarityReport stationarity_check(const Strategy& strategy,
                                      const DerivedParams& game, double tol);

struct GridOracleOptions {
  double gain_tol = 1e-6;
  std::uint64_t max_evaluations = 10'000'000;
};

// All symmetric grid strategies (denominators d) whose symmetric profile has
// every deviation gain <= gain_tol. Sorted lexicographically.
std::vector<Strategy> grid_oracle_symmetric(int m, const DerivedParams& game,
                                            int resolution,
                                            const GridOracleOptions& opts = {});

// All (x, y, z) grid profiles passing the same test; practical for m = 2.
std::vector<Profile> grid_oracle_profiles(int m, const DerivedParams& game,
                                          int resolution,
                                          const GridOracleOptions& opts = {});

}  // namespace m3ma

#endif  // M3MA_VERIFIER_HPP
