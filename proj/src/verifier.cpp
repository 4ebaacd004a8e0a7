#include "m3ma/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace m3ma {

namespace {

double one_sided_gain(const Strategy& own, const Strategy& opp_first,
                      const Strategy& opp_second, const DerivedParams& game) {
  double best = -std::numeric_limits<double>::infinity();
  double value = 0.0;
  for (int i = 0; i < own.size(); ++i) {
    const double f = gradient_component(opp_first[i], opp_second[i], game);
    best = std::max(best, f);
    value += own[i] * f;
  }
  return best - value;
}

std::uint64_t composition_count(int m, int d) {
  // C(d + m - 1, m - 1); saturates well before uint64 overflow
  std::uint64_t num = 1;
  for (int i = 1; i <= m - 1; ++i) {
    if (num > (std::uint64_t{1} << 50))
      return std::numeric_limits<std::uint64_t>::max();
    num = num * static_cast<std::uint64_t>(d + i) / static_cast<std::uint64_t>(i);
  }
  return num;
}

std::vector<std::vector<int>> all_compositions(int m, int total) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<size_t>(m), 0);
  // recursive enumeration in lexicographic order
  struct Rec {
    int m;
    std::vector<std::vector<int>>& out;
    std::vector<int>& cur;
    void go(int pos, int remaining) {
      if (pos == m - 1) {
        cur[static_cast<size_t>(pos)] = remaining;
        out.push_back(cur);
        return;
      }
      for (int v = 0; v <= remaining; ++v) {
        cur[static_cast<size_t>(pos)] = v;
        go(pos + 1, remaining - v);
      }
    }
  } rec{m, out, cur};
  rec.go(0, total);
  return out;
}

Strategy strategy_from_counts(const std::vector<int>& counts, int d) {
  std::vector<double> p(counts.size());
  for (size_t i = 0; i < counts.size(); ++i)
    p[i] = static_cast<double>(counts[i]) / d;
  return Strategy(std::move(p));
}

}  // namespace

std::array<double, 3> deviation_gain(const Profile& profile,
                                     const DerivedParams& game) {
  return {one_sided_gain(profile.x, profile.y, profile.z, game),
          one_sided_gain(profile.y, profile.z, profile.x, game),
          one_sided_gain(profile.z, profile.x, profile.y, game)};
}

bool is_epsilon_nash(const Profile& profile, const DerivedParams& game,
                     double tol) {
  if (tol < 0.0) throw std::invalid_argument("is_epsilon_nash: tol < 0");
  const auto g = deviation_gain(profile, game);
  return g[0] <= tol && g[1] <= tol && g[2] <= tol;
}

StationarityReport stationarity_check(const Strategy& strategy,
                                      const DerivedParams& game, double tol) {
  StationarityReport r;
  double sum = 0.0;
  int support = 0;
  bool has_zero = false;
  for (int i = 0; i < strategy.size(); ++i) {
    if (strategy[i] > 0.0) {
      sum += f_tilde(strategy[i], game);
      ++support;
    } else {
      has_zero = true;
    }
  }
  r.common_value = sum / support;
  for (int i = 0; i < strategy.size(); ++i)
    if (strategy[i] > 0.0)
      r.max_equality_violation =
          std::max(r.max_equality_violation,
                   std::abs(f_tilde(strategy[i], game) - r.common_value));
  r.max_inequality_violation =
      has_zero ? std::max(0.0, -r.common_value) : 0.0;
  r.is_nash =
      r.max_equality_violation <= tol && r.max_inequality_violation <= tol;
  return r;
}

std::vector<Strategy> grid_oracle_symmetric(int m, const DerivedParams& game,
                                            int resolution,
                                            const GridOracleOptions& opts) {
  if (resolution < 2)
    throw std::invalid_argument("grid_oracle: resolution must be >= 2");
  if (composition_count(m, resolution) > opts.max_evaluations)
    throw std::runtime_error("grid_oracle: grid exceeds evaluation cap");
  std::vector<Strategy> out;
  for (const std::vector<int>& counts : all_compositions(m, resolution)) {
    Strategy s = strategy_from_counts(counts, resolution);
    const auto g = deviation_gain(Profile::symmetric(s), game);
    if (g[0] <= opts.gain_tol && g[1] <= opts.gain_tol &&
        g[2] <= opts.gain_tol)
      out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Profile> grid_oracle_profiles(int m, const DerivedParams& game,
                                          int resolution,
                                          const GridOracleOptions& opts) {
  if (resolution < 2)
    throw std::invalid_argument("grid_oracle: resolution must be >= 2");
  const std::uint64_t n = composition_count(m, resolution);
  if (n > (std::uint64_t{1} << 20) || n * n * n > opts.max_evaluations)
    throw std::runtime_error("grid_oracle: grid exceeds evaluation cap");
  std::vector<Strategy> pts;
  for (const std::vector<int>& counts : all_compositions(m, resolution))
    pts.push_back(strategy_from_counts(counts, resolution));
  std::vector<Profile> out;
  for (const Strategy& x : pts)
    for (const Strategy& y : pts)
      for (const Strategy& z : pts) {
        Profile p(x, y, z);
        const auto g = deviation_gain(p, game);
        if (g[0] <= opts.gain_tol && g[1] <= opts.gain_tol &&
            g[2] <= opts.gain_tol)
          out.push_back(std::move(p));
      }
  return out;
}

}  // namespace m3ma
