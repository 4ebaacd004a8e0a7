#ifndef M3MA_EQUILIBRIUM_HPP
#define M3MA_EQUILIBRIUM_HPP

#include <optional>
#include <string>
#include <vector>

#include "m3ma/game.hpp"

// Full Nash-equilibrium enumeration. Every equilibrium is symmetric
// (x = y = z), so the set is described by one strategy per point. A symmetric
// strategy with support S is an equilibrium iff f_tilde is constant (= C) on
// S and 0 <= C whenever S is a proper support (f_tilde(0) = 0 must not beat
// the played actions). Everything below works off that single condition.

namespace m3ma {

// The five qualitative parameter regimes, ordered; the first matching row
// wins for overlapping boundary cases (alpha = gamma = 0 satisfies several).
enum class RegimeClass {
  Neutral,           // alpha = gamma = 0: every strategy is an equilibrium
  BothNonpositive,   // alpha <= 0, gamma <= 0
  AlphaPosGammaNeg,  // alpha > 0 > gamma
  BothNonnegative,   // alpha >= 0, gamma >= 0
  GammaPosAlphaNeg,  // gamma > 0 > alpha
};

const char* regime_name(RegimeClass r);

// A strategy using exactly two probability values: k entries of x_plus and
// (support_size - k) entries of x_minus, zeros elsewhere; f_tilde takes the
// same value at x_plus and x_minus.
struct DoubleRootPattern {
  int k = 0;
  double x_plus = 0.0;
  double x_minus = 0.0;
  int support_size = 0;

  double common_value(double alpha, double gamma) const {
    return f_tilde(x_plus, alpha, gamma);
  }
};

struct EquilibriumFamily {
  enum class Kind { Uniform, DoubleRoots };

  Kind kind = Kind::Uniform;
  int support_size = 1;  // Uniform with support 1 is a pure strategy
  std::optional<DoubleRootPattern> roots;  // set iff kind == DoubleRoots

  bool is_pure() const { return kind == Kind::Uniform && support_size == 1; }
};

struct EquilibriumSet {
  bool continuum = false;  // whole simplex (alpha = gamma = 0)
  std::vector<EquilibriumFamily> families;
  // Degenerate parameter notes: dropped boundary patterns (x_minus = 0) and
  // two-value continuum families on lines where support * extremum == 1.
  std::vector<std::string> notes;

  bool contains_pure() const;
  bool contains_uniform_support(int support) const;
};

RegimeClass classify_regime(double alpha, double gamma);

// Location of the extremum of f_tilde: gamma / (2 (gamma - alpha)).
// Throws std::domain_error when alpha == gamma (f_tilde degenerates to a
// line and has no extremum).
double extremum_point(double alpha, double gamma);

// All two-value patterns on a given support size. Empty unless alpha and
// gamma have strictly opposite signs; admissibility is the strict window
// 0 < delta < x_ext (patterns with x_minus = 0 duplicate smaller supports
// and are dropped).
std::vector<DoubleRootPattern> double_root_patterns(int support_size,
                                                    double alpha,
                                                    double gamma);

// Unified support-condition enumerator (the authoritative route).
EquilibriumSet enumerate_equilibria(int m, double alpha, double gamma);

// Independent casewise route: builds the set directly from the five-regime
// case split and its inverse-projection unions. Cross-checks the unified
// enumerator; not valid on the degenerate lines flagged by
// enumerate_equilibria (the case split misses those boundary families).
EquilibriumSet enumerate_equilibria_casewise(int m, double alpha, double gamma);

// Expands finite families into all distinct points of their permutation
// orbits. Uniform(support s) gives C(m,s) points; DoubleRoots gives
// C(m,s)*C(s,k). Throws std::invalid_argument for a continuum set.
std::vector<Strategy> expand_points(const EquilibriumSet& set, int m);

}  // namespace m3ma

#endif  // M3MA_EQUILIBRIUM_HPP
