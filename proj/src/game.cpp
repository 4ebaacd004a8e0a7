#include "m3ma/game.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace m3ma {

namespace {
constexpr double kSumRenormTol = 1e-6;
constexpr double kComponentSlack = 1e-12;
}  // namespace

void GameScores::validate() const {
  if (m < 2) throw std::invalid_argument("GameScores: m must be >= 2");
  if (!(b < c)) throw std::invalid_argument("GameScores: requires b < c");
  if (!(c < a)) throw std::invalid_argument("GameScores: requires c < a");
  if (!(b < epsilon))
    throw std::invalid_argument("GameScores: requires b < epsilon");
  if (!(epsilon < a))
    throw std::invalid_argument("GameScores: requires epsilon < a");
}

void DerivedParams::validate() const {
  if (!(beta > 0.0))
    throw std::invalid_argument("DerivedParams: requires beta > 0");
  if (!(std::abs(gamma) < beta))
    throw std::invalid_argument(
        "DerivedParams: requires |gamma| < beta (equivalent to b < c < a)");
  if (!(0.5 * (gamma - beta) < alpha && alpha < 0.5 * (gamma + beta)))
    throw std::invalid_argument(
        "DerivedParams: requires (gamma-beta)/2 < alpha < (gamma+beta)/2 "
        "(equivalent to b < epsilon < a)");
}

DerivedParams derive_params(const GameScores& scores) {
  scores.validate();
  DerivedParams d;
  d.alpha = scores.epsilon - scores.c;
  d.beta = scores.a - scores.b;
  d.gamma = scores.a + scores.b - 2.0 * scores.c;
  d.offset = scores.c;
  return d;
}

namespace {

// Nudges v by ulps until check(v) holds, so the scores round-trip through
// derive_params bit-for-bit. Gives up (keeping the nearest value) when the
// score scales are too far apart for an exact representation to exist.
template <typename Check>
double ulp_adjust(double v, const Check& check) {
  if (check(v)) return v;
  for (double dir : {std::numeric_limits<double>::infinity(),
                     -std::numeric_limits<double>::infinity()}) {
    double w = v;
    for (int i = 0; i < 4; ++i) {
      w = std::nextafter(w, dir);
      if (check(w)) return w;
    }
  }
  return v;
}

}  // namespace

GameScores scores_from_derived(double alpha, double beta, double gamma,
                               double offset, int m) {
  DerivedParams d{alpha, beta, gamma, offset};
  d.validate();
  GameScores s;
  s.c = offset;
  s.epsilon =
      ulp_adjust(offset + alpha, [&](double e) { return e - offset == alpha; });
  // a and b must reproduce both their difference (beta) and their sum
  // relative to 2c (gamma)
  const double target_sum =
      ulp_adjust(2.0 * offset + gamma,
                 [&](double u) { return u - 2.0 * offset == gamma; });
  s.a = offset + 0.5 * (beta + gamma);
  s.b = offset + 0.5 * (gamma - beta);
  for (int ai = -3; ai <= 3; ++ai) {
    const double a = ai == 0 ? s.a
                             : std::nextafter(
                                   s.a, ai > 0
                                            ? std::numeric_limits<double>::infinity()
                                            : -std::numeric_limits<double>::infinity());
    const double b0 = a - beta;
    for (int bi = -3; bi <= 3; ++bi) {
      const double b = bi == 0 ? b0
                               : std::nextafter(
                                     b0, bi > 0
                                              ? std::numeric_limits<double>::infinity()
                                              : -std::numeric_limits<double>::infinity());
      if (a - b == beta && a + b == target_sum &&
          a + b - 2.0 * offset == gamma) {
        s.a = a;
        s.b = b;
        s.m = m;
        s.validate();
        return s;
      }
    }
  }
  s.m = m;
  s.validate();
  return s;
}

Strategy::Strategy(std::vector<double> probs) : p_(std::move(probs)) {
  if (p_.size() < 2)
    throw std::invalid_argument("Strategy: needs at least 2 actions");
  double sum = 0.0;
  for (double& v : p_) {
    if (!std::isfinite(v))
      throw std::invalid_argument("Strategy: non-finite component");
    if (v < -kComponentSlack || v > 1.0 + kSumRenormTol)
      throw std::invalid_argument("Strategy: component outside [0,1]");
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumRenormTol)
    throw std::invalid_argument("Strategy: probabilities must sum to 1");
  if (sum != 1.0)
    for (double& v : p_) v /= sum;
}

Strategy Strategy::uniform(int m) {
  return Strategy(std::vector<double>(static_cast<size_t>(m), 1.0 / m));
}

Strategy Strategy::pure(int m, int action) {
  std::vector<double> p(static_cast<size_t>(m), 0.0);
  p.at(static_cast<size_t>(action)) = 1.0;
  return Strategy(std::move(p));
}

Profile::Profile(Strategy x_, Strategy y_, Strategy z_)
    : x(std::move(x_)), y(std::move(y_)), z(std::move(z_)) {
  if (x.size() != y.size() || y.size() != z.size())
    throw std::invalid_argument("Profile: players must share one action count");
}

double payoff(const Strategy& x, const Strategy& y, const Strategy& z,
              const DerivedParams& game) {
  if (x.size() != y.size() || y.size() != z.size())
    throw std::invalid_argument("payoff: strategy lengths differ");
  // u is linear in the own strategy: u = sum_i x_i f(y_i, z_i).
  double u = 0.0;
  for (int i = 0; i < x.size(); ++i)
    u += x[i] * gradient_component(y[i], z[i], game);
  return u;
}

double payoff(const Strategy& x, const Strategy& y, const Strategy& z,
              const GameScores& scores) {
  if (x.size() != y.size() || y.size() != z.size())
    throw std::invalid_argument("payoff: strategy lengths differ");
  double u = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double xi = x[i], yi = y[i], zi = z[i];
    u += scores.epsilon * xi * yi * zi + scores.a * xi * yi * (1.0 - zi) +
         scores.b * xi * (1.0 - yi) * zi +
         scores.c * xi * (1.0 - yi) * (1.0 - zi);
  }
  return u;
}

std::vector<double> payoff_gradient(const Strategy& y, const Strategy& z,
                                    const DerivedParams& game) {
  if (y.size() != z.size())
    throw std::invalid_argument("payoff_gradient: strategy lengths differ");
  std::vector<double> g(static_cast<size_t>(y.size()));
  for (int i = 0; i < y.size(); ++i)
    g[static_cast<size_t>(i)] = gradient_component(y[i], z[i], game);
  return g;
}

double f_tilde(double p, const DerivedParams& game) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("f_tilde: argument outside [0,1]");
  return f_tilde(p, game.alpha, game.gamma);
}

}  // namespace m3ma
