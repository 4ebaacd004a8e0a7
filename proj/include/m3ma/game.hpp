#ifndef M3MA_GAME_HPP
#define M3MA_GAME_HPP

#include <array>
#include <string>
#include <vector>

// Three-player matching games with m actions. Players X, Y, Z pick from the
// same action set; players choosing the same action interact under a cyclic
// dominance relation (X beats Y beats Z beats X). Raw scores are
//   a: winner (two players match), b: loser, c: isolated player,
//   epsilon: all three match,
// with b < c < a and b < epsilon < a. The derived coordinates
//   alpha = epsilon - c, beta = a - b, gamma = a + b - 2c
// (plus the additive offset c) determine everything: alpha is the
// synchronization force, beta the rotation force, gamma the
// competition-seeking force.

namespace m3ma {

struct GameScores {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double epsilon = 0.0;
  int m = 2;

  // Throws std::invalid_argument naming the violated inequality.
  void validate() const;
};

struct DerivedParams {
  double alpha = 0.0;
  double beta = 2.0;
  double gamma = 0.0;
  double offset = 0.0;  // the score c; shifts payoffs, never the flow

  void validate() const;
};

DerivedParams derive_params(const GameScores& scores);
GameScores scores_from_derived(double alpha, double beta, double gamma,
                               double offset, int m = 2);

// A mixed strategy: probability vector on the m-simplex. Construction
// renormalizes inputs whose sum is within 1e-6 of one and rejects anything
// worse; components must be in [0,1] up to 1e-12 slack.
class Strategy {
 public:
  explicit Strategy(std::vector<double> probs);

  static Strategy uniform(int m);
  static Strategy pure(int m, int action);

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_[static_cast<size_t>(i)]; }
  const std::vector<double>& probs() const { return p_; }

  bool operator==(const Strategy& o) const { return p_ == o.p_; }
  bool operator<(const Strategy& o) const { return p_ < o.p_; }

 private:
  std::vector<double> p_;
};

struct Profile {
  Strategy x, y, z;

  Profile(Strategy x_, Strategy y_, Strategy z_);
  static Profile symmetric(const Strategy& s) { return Profile(s, s, s); }
  int actions() const { return x.size(); }
};

// Expected payoff of the first argument's player; the other two players'
// payoffs are payoff(y,z,x,...) and payoff(z,x,y,...).
double payoff(const Strategy& x, const Strategy& y, const Strategy& z,
              const DerivedParams& game);
double payoff(const Strategy& x, const Strategy& y, const Strategy& z,
              const GameScores& scores);

// Componentwise payoff gradient of a player facing opponents (y, z):
//   f(y_i, z_i) = (alpha-gamma) y_i z_i + (beta+gamma)/2 y_i
//               + (-beta+gamma)/2 z_i + c.
std::vector<double> payoff_gradient(const Strategy& y, const Strategy& z,
                                    const DerivedParams& game);

// Raw scalar form of the gradient, used in hot loops.
inline double gradient_component(double y, double z, const DerivedParams& g) {
  return (g.alpha - g.gamma) * y * z + 0.5 * (g.beta + g.gamma) * y +
         0.5 * (g.gamma - g.beta) * z + g.offset;
}

// Diagonal gradient f(p, p) with the offset dropped:
//   f_tilde(p) = (alpha-gamma) p^2 + gamma p.
// Its level sets on [0,1] determine every equilibrium support.
double f_tilde(double p, const DerivedParams& game);

inline double f_tilde(double p, double alpha, double gamma) {
  return (alpha - gamma) * p * p + gamma * p;
}

}  // namespace m3ma

#endif  // M3MA_GAME_HPP
