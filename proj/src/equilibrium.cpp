#include "m3ma/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace m3ma {

const char* regime_name(RegimeClass r) {
  switch (r) {
    case RegimeClass::Neutral: return "Neutral";
    case RegimeClass::BothNonpositive: return "BothNonpositive";
    case RegimeClass::AlphaPosGammaNeg: return "AlphaPosGammaNeg";
    case RegimeClass::BothNonnegative: return "BothNonnegative";
    case RegimeClass::GammaPosAlphaNeg: return "GammaPosAlphaNeg";
  }
  return "?";
}

RegimeClass classify_regime(double alpha, double gamma) {
  if (alpha == 0.0 && gamma == 0.0) return RegimeClass::Neutral;
  if (alpha <= 0.0 && gamma <= 0.0) return RegimeClass::BothNonpositive;
  if (alpha > 0.0 && gamma < 0.0) return RegimeClass::AlphaPosGammaNeg;
  if (alpha >= 0.0 && gamma >= 0.0) return RegimeClass::BothNonnegative;
  return RegimeClass::GammaPosAlphaNeg;
}

double extremum_point(double alpha, double gamma) {
  if (alpha == gamma)
    throw std::domain_error(
        "extremum_point: alpha == gamma makes f_tilde linear (no extremum)");
  return gamma / (2.0 * (gamma - alpha));
}

std::vector<DoubleRootPattern> double_root_patterns(int support_size,
                                                    double alpha,
                                                    double gamma) {
  std::vector<DoubleRootPattern> out;
  if (support_size < 2) return out;
  // Two-value level sets need a parabola whose extremum sits in (0, 1/2),
  // which happens exactly when alpha and gamma have opposite strict signs.
  if (!(alpha * gamma < 0.0)) return out;
  const double x_ext = extremum_point(alpha, gamma);
  for (int k = 1; k < support_size; ++k) {
    if (2 * k == support_size) continue;  // sum constraint needs m'*x_ext == 1
    const double delta =
        (support_size * x_ext - 1.0) / static_cast<double>(support_size - 2 * k);
    if (!(delta > 0.0 && delta < x_ext)) continue;
    DoubleRootPattern p;
    p.k = k;
    p.x_plus = x_ext + delta;
    p.x_minus = x_ext - delta;
    p.support_size = support_size;
    out.push_back(p);
  }
  return out;
}

namespace {

void sort_families(std::vector<EquilibriumFamily>& fams) {
  std::sort(fams.begin(), fams.end(),
            [](const EquilibriumFamily& a, const EquilibriumFamily& b) {
              if (a.support_size != b.support_size)
                return a.support_size < b.support_size;
              if (a.kind != b.kind) return a.kind < b.kind;
              if (a.roots && b.roots) return a.roots->k < b.roots->k;
              return false;
            });
}

EquilibriumFamily uniform_family(int support) {
  EquilibriumFamily f;
  f.kind = EquilibriumFamily::Kind::Uniform;
  f.support_size = support;
  return f;
}

EquilibriumFamily roots_family(const DoubleRootPattern& p) {
  EquilibriumFamily f;
  f.kind = EquilibriumFamily::Kind::DoubleRoots;
  f.support_size = p.support_size;
  f.roots = p;
  return f;
}

// Degenerate lines: when support * x_ext == 1 exactly for an even support,
// the k = support/2 branch admits a one-parameter continuum of two-value
// strategies. Those are flagged, not enumerated.
void flag_degenerate_lines(int m, double alpha, double gamma,
                           EquilibriumSet& set) {
  if (alpha == gamma) return;
  double x_ext;
  try {
    x_ext = extremum_point(alpha, gamma);
  } catch (const std::domain_error&) {
    return;
  }
  if (!(x_ext > 0.0 && x_ext < 1.0)) return;
  const bool opens_down = alpha - gamma < 0.0;  // interior values C > 0
  for (int mp = 2; mp <= m; mp += 2) {
    if (mp * x_ext != 1.0) continue;
    if (mp == m || opens_down)
      set.notes.push_back(
          "degenerate line: continuum of two-value equilibria on supports of "
          "size " +
          std::to_string(mp) + " (support*x_ext == 1); not enumerated");
  }
}

// The boundary case delta == x_ext gives x_minus = 0; the point re-enters as
// the uniform family on the k plus-slots, so the pattern itself is dropped.
void flag_boundary_patterns(int m, double alpha, double gamma,
                            EquilibriumSet& set) {
  if (!(alpha * gamma < 0.0)) return;
  const double x_ext = extremum_point(alpha, gamma);
  for (int mp = 2; mp <= m; ++mp)
    for (int k = 1; k < mp; ++k) {
      if (2 * k == mp) continue;
      const double delta = (mp * x_ext - 1.0) / static_cast<double>(mp - 2 * k);
      if (delta == x_ext)
        set.notes.push_back(
            "boundary pattern dropped: support " + std::to_string(mp) +
            ", k=" + std::to_string(k) +
            " has x_minus = 0; covered by the uniform family on " +
            std::to_string(k) + " actions");
    }
}

}  // namespace

bool EquilibriumSet::contains_pure() const {
  return std::any_of(families.begin(), families.end(),
                     [](const EquilibriumFamily& f) { return f.is_pure(); });
}

bool EquilibriumSet::contains_uniform_support(int support) const {
  return std::any_of(families.begin(), families.end(),
                     [support](const EquilibriumFamily& f) {
                       return f.kind == EquilibriumFamily::Kind::Uniform &&
                              f.support_size == support;
                     });
}

EquilibriumSet enumerate_equilibria(int m, double alpha, double gamma) {
  if (m < 2) throw std::invalid_argument("enumerate_equilibria: m must be >= 2");
  EquilibriumSet set;
  if (alpha == 0.0 && gamma == 0.0) {
    set.continuum = true;
    return set;
  }
  for (int mp = 1; mp <= m; ++mp) {
    // Uniform value 1/m' on the support; the off-support condition
    // f_tilde(0) = 0 <= C only binds for proper supports.
    if (mp == m || f_tilde(1.0 / mp, alpha, gamma) >= 0.0)
      set.families.push_back(uniform_family(mp));
    for (const DoubleRootPattern& p : double_root_patterns(mp, alpha, gamma))
      if (mp == m || p.common_value(alpha, gamma) >= 0.0)
        set.families.push_back(roots_family(p));
  }
  sort_families(set.families);
  flag_boundary_patterns(m, alpha, gamma, set);
  flag_degenerate_lines(m, alpha, gamma, set);
  return set;
}

EquilibriumSet enumerate_equilibria_casewise(int m, double alpha,
                                             double gamma) {
  if (m < 2)
    throw std::invalid_argument(
        "enumerate_equilibria_casewise: m must be >= 2");
  EquilibriumSet set;
  const RegimeClass regime = classify_regime(alpha, gamma);
  switch (regime) {
    case RegimeClass::Neutral:
      set.continuum = true;
      return set;
    case RegimeClass::BothNonpositive:
      set.families.push_back(uniform_family(m));
      break;
    case RegimeClass::BothNonnegative: {
      set.families.push_back(uniform_family(1));
      set.families.push_back(uniform_family(m));
      for (int mp = 2; mp <= m - 1; ++mp)
        set.families.push_back(uniform_family(mp));
      break;
    }
    case RegimeClass::AlphaPosGammaNeg: {
      const double x_ext = extremum_point(alpha, gamma);
      const double bound = 1.0 / (2.0 * x_ext);
      set.families.push_back(uniform_family(1));
      set.families.push_back(uniform_family(m));
      // A^- = {2, ..., floor(1/(2 x_ext))} capped at m-1
      const int hi = std::min(static_cast<int>(std::floor(bound)), m - 1);
      for (int mp = 2; mp <= hi; ++mp)
        set.families.push_back(uniform_family(mp));
      for (const DoubleRootPattern& p : double_root_patterns(m, alpha, gamma))
        set.families.push_back(roots_family(p));
      break;
    }
    case RegimeClass::GammaPosAlphaNeg: {
      const double x_ext = extremum_point(alpha, gamma);
      const double bound = 1.0 / (2.0 * x_ext);
      set.families.push_back(uniform_family(m));
      // A^+ = {ceil(1/(2 x_ext)), ..., m-1}
      const int lo = std::max(2, static_cast<int>(std::ceil(bound)));
      for (int mp = lo; mp <= m - 1; ++mp)
        set.families.push_back(uniform_family(mp));
      for (int mp = 2; mp <= m; ++mp)
        for (const DoubleRootPattern& p :
             double_root_patterns(mp, alpha, gamma))
          set.families.push_back(roots_family(p));
      break;
    }
  }
  sort_families(set.families);
  return set;
}

std::vector<Strategy> expand_points(const EquilibriumSet& set, int m) {
  if (set.continuum)
    throw std::invalid_argument(
        "expand_points: continuum set cannot be expanded into points");
  std::set<std::vector<double>> seen;
  std::vector<std::vector<int>> supports;  // index combinations, reused

  auto combinations = [](int n, int r) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(static_cast<size_t>(r));
    for (int i = 0; i < r; ++i) idx[static_cast<size_t>(i)] = i;
    while (true) {
      out.push_back(idx);
      int i = r - 1;
      while (i >= 0 && idx[static_cast<size_t>(i)] == n - r + i) --i;
      if (i < 0) break;
      ++idx[static_cast<size_t>(i)];
      for (int j = i + 1; j < r; ++j)
        idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
    return out;
  };

  for (const EquilibriumFamily& fam : set.families) {
    const int mp = fam.support_size;
    if (mp > m)
      throw std::invalid_argument("expand_points: support exceeds m");
    for (const std::vector<int>& support : combinations(m, mp)) {
      if (fam.kind == EquilibriumFamily::Kind::Uniform) {
        std::vector<double> v(static_cast<size_t>(m), 0.0);
        for (int i : support) v[static_cast<size_t>(i)] = 1.0 / mp;
        seen.insert(std::move(v));
      } else {
        const DoubleRootPattern& p = *fam.roots;
        for (const std::vector<int>& plus_slots : combinations(mp, p.k)) {
          std::vector<double> v(static_cast<size_t>(m), 0.0);
          for (int i : support) v[static_cast<size_t>(i)] = p.x_minus;
          for (int s : plus_slots)
            v[static_cast<size_t>(support[static_cast<size_t>(s)])] = p.x_plus;
          seen.insert(std::move(v));
        }
      }
    }
  }
  std::vector<Strategy> out;
  out.reserve(seen.size());
  for (const std::vector<double>& v : seen) out.emplace_back(v);
  return out;
}

}  // namespace m3ma
