// Command-line driver: equilibrium listings, trajectory simulation, parameter
// sweeps, profile verification, and the identity selftest. Exit codes:
//   0 success (verify: the profile is a Nash point)
//   1 verify rejected the profile / selftest failure
//   2 invalid arguments, config, or inputs
//   3 integration blow-up (sweep: every cell failed)

#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "m3ma/diagnostics.hpp"
#include "m3ma/equilibrium.hpp"
#include "m3ma/experiment.hpp"
#include "m3ma/verifier.hpp"

namespace {

using m3ma::DerivedParams;
using m3ma::EquilibriumFamily;
using m3ma::EquilibriumSet;
using m3ma::Profile;
using m3ma::Strategy;
using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_number_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("bad number: " + tok);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

std::string family_description(const EquilibriumFamily& f) {
  std::ostringstream os;
  if (f.kind == EquilibriumFamily::Kind::Uniform) {
    if (f.is_pure())
      os << "pure";
    else
      os << "uniform on " << f.support_size << " actions";
  } else {
    os << "double-roots on " << f.support_size << " actions (k=" << f.roots->k
       << ", x+=" << f.roots->x_plus << ", x-=" << f.roots->x_minus << ")";
  }
  return os.str();
}

int cmd_equilibria(int m, double alpha, double gamma, bool beta_given,
                   const std::string& format) {
  if (beta_given)
    std::cerr << "note: beta does not affect the equilibrium set; ignoring\n";
  const EquilibriumSet set = m3ma::enumerate_equilibria(m, alpha, gamma);
  const char* regime = m3ma::regime_name(m3ma::classify_regime(alpha, gamma));
  // gains evaluated at an arbitrary feasible beta
  const DerivedParams game{alpha, std::abs(gamma) + 1.0, gamma, 0.0};

  if (format == "json") {
    json j;
    j["regime"] = regime;
    j["continuum"] = set.continuum;
    j["notes"] = set.notes;
    json fams = json::array();
    json pts = json::array();
    if (!set.continuum) {
      for (const EquilibriumFamily& f : set.families)
        fams.push_back(family_description(f));
      for (const Strategy& s : m3ma::expand_points(set, m)) {
        const auto g = m3ma::deviation_gain(Profile::symmetric(s), game);
        pts.push_back({{"probs", s.probs()},
                       {"max_gain", std::max({g[0], g[1], g[2]})}});
      }
    }
    j["families"] = fams;
    j["points"] = pts;
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  // csv (default): header + rows; continuum sets emit a marker row
  std::cout << "regime,kind,";
  for (int i = 1; i <= m; ++i) std::cout << "p_" << i << ",";
  std::cout << "max_gain\n";
  if (set.continuum) {
    std::cout << regime << ",continuum";
    for (int i = 0; i < m + 1; ++i) std::cout << ",";
    std::cout << "\n";
    return 0;
  }
  for (const std::string& note : set.notes)
    std::cerr << "note: " << note << "\n";
  for (const EquilibriumFamily& f : set.families)
    std::cerr << "family: " << family_description(f) << "\n";
  const auto points = m3ma::expand_points(set, m);
  for (const Strategy& s : points) {
    const auto g = m3ma::deviation_gain(Profile::symmetric(s), game);
    std::cout << regime << ",point";
    for (int i = 0; i < m; ++i) std::cout << "," << fmt17(s[i]);
    std::cout << "," << fmt17(std::max({g[0], g[1], g[2]})) << "\n";
  }
  std::cerr << set.families.size() << " families, " << points.size()
            << " points\n";
  return 0;
}

int cmd_verify(const DerivedParams& game, const Profile& profile) {
  const auto gains = m3ma::deviation_gain(profile, game);
  std::cout << "deviation gains: " << fmt17(gains[0]) << " " << fmt17(gains[1])
            << " " << fmt17(gains[2]) << "\n";
  const bool symmetric =
      profile.x == profile.y && profile.y == profile.z;
  if (symmetric) {
    const auto rep = m3ma::stationarity_check(profile.x, game, 1e-9);
    std::cout << "stationarity: C=" << fmt17(rep.common_value)
              << " eq_violation=" << fmt17(rep.max_equality_violation)
              << " ineq_violation=" << fmt17(rep.max_inequality_violation)
              << "\n";
  }
  const bool nash = m3ma::is_epsilon_nash(profile, game, 1e-9);
  std::cout << "is_nash: " << (nash ? "true" : "false") << "\n";
  return nash ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-player matching m-action games: equilibria, learning "
               "dynamics, diagnostics"};
  app.require_subcommand(1);

  // --- equilibria ---
  auto* eq = app.add_subcommand("equilibria", "enumerate Nash equilibria");
  int eq_m = 3;
  double eq_alpha = 0.0, eq_gamma = 0.0, eq_beta = 0.0;
  std::string eq_format = "csv";
  eq->add_option("--m", eq_m, "number of actions")->required();
  eq->add_option("--alpha", eq_alpha, "synchronization force")->required();
  eq->add_option("--gamma", eq_gamma, "competition force")->required();
  auto* eq_beta_opt = eq->add_option("--beta", eq_beta, "rotation force (unused)");
  eq->add_option("--format", eq_format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // --- simulate ---
  auto* sim = app.add_subcommand("simulate", "integrate FTRL trajectories");
  std::string sim_config, sim_out_dir;
  std::uint64_t sim_seed = 0;
  sim->add_option("--config", sim_config, "experiment config JSON")->required();
  sim->add_option("--out-dir", sim_out_dir, "output directory");
  auto* sim_seed_opt =
      sim->add_option("--seed", sim_seed, "override the config init seed");

  // --- sweep ---
  auto* sw = app.add_subcommand("sweep", "simulate over an alpha x gamma grid");
  std::string sw_config, sw_out_dir, sw_alphas, sw_gammas;
  std::uint64_t sw_seed = 0;
  sw->add_option("--config", sw_config, "base experiment config JSON")
      ->required();
  sw->add_option("--alphas", sw_alphas, "comma-separated alpha values")
      ->required();
  sw->add_option("--gammas", sw_gammas, "comma-separated gamma values")
      ->required();
  sw->add_option("--out-dir", sw_out_dir, "output directory")->required();
  auto* sw_seed_opt =
      sw->add_option("--seed", sw_seed, "override the config init seed");

  // --- verify ---
  auto* vf = app.add_subcommand("verify", "check a profile for equilibrium");
  int vf_m = 0;
  double vf_alpha = 0.0, vf_beta = 2.0, vf_gamma = 0.0, vf_offset = 0.0;
  std::string vf_scores, vf_x, vf_y, vf_z;
  vf->add_option("--m", vf_m, "number of actions");
  vf->add_option("--alpha", vf_alpha, "synchronization force");
  vf->add_option("--beta", vf_beta, "rotation force");
  vf->add_option("--gamma", vf_gamma, "competition force");
  vf->add_option("--offset", vf_offset, "payoff offset c");
  vf->add_option("--scores", vf_scores, "a,b,c,epsilon (alternative to derived)");
  vf->add_option("--x", vf_x, "player X probabilities, comma separated")
      ->required();
  vf->add_option("--y", vf_y, "player Y probabilities (default: same as X)");
  vf->add_option("--z", vf_z, "player Z probabilities (default: same as X)");

  // --- selftest ---
  auto* st = app.add_subcommand("selftest", "run the identity suites");
  std::uint64_t st_seed = 20240215;
  st->add_option("--seed", st_seed, "suite seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (eq->parsed())
      return cmd_equilibria(eq_m, eq_alpha, eq_gamma, eq_beta_opt->count() > 0,
                            eq_format);

    if (sim->parsed()) {
      m3ma::ExperimentConfig cfg = m3ma::load_experiment_config(sim_config);
      if (sim_seed_opt->count() > 0) cfg.inits.seed = sim_seed;
      const m3ma::SimulateOutcome out = m3ma::run_simulate(cfg, sim_out_dir);
      for (const m3ma::InitResult& r : out.per_init)
        std::cout << "init seed=" << r.seed
                  << " label=" << m3ma::regime_tag_name(r.label.tag)
                  << " V_terminal=" << fmt17(r.v_terminal) << "\n";
      return out.exit_code;
    }

    if (sw->parsed()) {
      m3ma::ExperimentConfig base = m3ma::load_experiment_config(sw_config);
      if (sw_seed_opt->count() > 0) base.inits.seed = sw_seed;
      const m3ma::SweepOutcome out =
          m3ma::run_sweep(base, parse_number_list(sw_alphas),
                          parse_number_list(sw_gammas), sw_out_dir);
      for (const m3ma::SweepCellResult& c : out.cells)
        std::cout << "cell alpha=" << c.alpha << " gamma=" << c.gamma << " "
                  << c.status << "\n";
      return out.exit_code;
    }

    if (vf->parsed()) {
      DerivedParams game;
      if (!vf_scores.empty()) {
        const auto s = parse_number_list(vf_scores);
        if (s.size() != 4)
          throw std::invalid_argument("--scores needs a,b,c,epsilon");
        game = m3ma::derive_params(
            m3ma::GameScores{s[0], s[1], s[2], s[3], vf_m > 0 ? vf_m : 2});
      } else {
        game = DerivedParams{vf_alpha, vf_beta, vf_gamma, vf_offset};
        game.validate();
      }
      Strategy x{parse_number_list(vf_x)};
      Strategy y = vf_y.empty() ? x : Strategy{parse_number_list(vf_y)};
      Strategy z = vf_z.empty() ? x : Strategy{parse_number_list(vf_z)};
      return cmd_verify(game, Profile(std::move(x), std::move(y),
                                      std::move(z)));
    }

    if (st->parsed()) return m3ma::run_selftest(st_seed, std::cout) ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
