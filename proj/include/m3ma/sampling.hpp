#ifndef M3MA_SAMPLING_HPP
#define M3MA_SAMPLING_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "m3ma/game.hpp"

// Deterministic sampling helpers. Uniform doubles are built from raw
// mt19937_64 output (not std::uniform_real_distribution, whose sequences
// vary across standard libraries), so identical seeds give identical
// strategies everywhere.

namespace m3ma {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// Flat Dirichlet sample (normalized standard exponentials), clamped to
// >= floor componentwise and renormalized.
inline std::vector<double> dirichlet(Rng& rng, int m, double floor = 1e-6) {
  std::vector<double> v(static_cast<size_t>(m));
  double sum = 0.0;
  for (double& x : v) {
    x = -std::log(1.0 - rng.uniform());
    sum += x;
  }
  for (double& x : v) x /= sum;
  double resum = 0.0;
  for (double& x : v) {
    if (x < floor) x = floor;
    resum += x;
  }
  for (double& x : v) x /= resum;
  return v;
}

inline Strategy random_interior_strategy(Rng& rng, int m,
                                         double floor = 1e-6) {
  return Strategy(dirichlet(rng, m, floor));
}

inline Profile random_interior_profile(Rng& rng, int m, double floor = 1e-6) {
  Strategy x = random_interior_strategy(rng, m, floor);
  Strategy y = random_interior_strategy(rng, m, floor);
  Strategy z = random_interior_strategy(rng, m, floor);
  return Profile(std::move(x), std::move(y), std::move(z));
}

}  // namespace m3ma

#endif  // M3MA_SAMPLING_HPP
