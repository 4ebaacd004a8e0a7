#include "m3ma/experiment.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "m3ma/sampling.hpp"

namespace m3ma {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const char* ctx) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok)
      throw std::invalid_argument(std::string("config: unknown key '") + key +
                                  "' in " + ctx);
  }
}

Regularizer parse_regularizer(const std::string& s) {
  if (s == "entropic") return Regularizer::Entropic;
  if (s == "euclidean") return Regularizer::Euclidean;
  throw std::invalid_argument("config: regularizer must be entropic|euclidean");
}

IntegrationMode parse_mode(const std::string& s) {
  if (s == "dual") return IntegrationMode::DualFtrl;
  if (s == "primal_replicator") return IntegrationMode::PrimalReplicator;
  if (s == "two_action") return IntegrationMode::TwoActionReduced;
  throw std::invalid_argument(
      "config: mode must be dual|primal_replicator|two_action");
}

Strategy parse_strategy(const json& arr) {
  if (!arr.is_array())
    throw std::invalid_argument("config: strategy must be an array");
  return Strategy(arr.get<std::vector<double>>());
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

DerivedParams GameConfig::params() const {
  if (scores.has_value() == derived.has_value())
    throw std::invalid_argument(
        "config: game needs exactly one of 'scores' or 'derived'");
  DerivedParams d = scores ? derive_params(*scores) : *derived;
  d.validate();
  return d;
}

IntegratorConfig ExperimentConfig::integrator() const {
  IntegratorConfig ic;
  ic.step = step;
  ic.horizon = horizon;
  ic.mode = mode;
  ic.regularizer = regularizer;
  ic.record_every = record_every;
  ic.validate();
  return ic;
}

namespace {
ExperimentConfig parse_experiment_config_impl(const json& j);
}  // namespace

ExperimentConfig parse_experiment_config(const json& j) {
  try {
    return parse_experiment_config_impl(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

namespace {

ExperimentConfig parse_experiment_config_impl(const json& j) {
  require_keys(j,
               {"game", "regularizer", "mode", "step", "horizon",
                "record_every", "inits", "outputs"},
               "top level");
  ExperimentConfig cfg;

  const json& g = j.at("game");
  require_keys(g, {"m", "scores", "derived"}, "game");
  cfg.game.m = g.at("m").get<int>();
  if (cfg.game.m < 2) throw std::invalid_argument("config: m must be >= 2");
  if (g.contains("scores")) {
    const json& s = g.at("scores");
    require_keys(s, {"a", "b", "c", "epsilon"}, "game.scores");
    GameScores sc;
    sc.a = s.at("a").get<double>();
    sc.b = s.at("b").get<double>();
    sc.c = s.at("c").get<double>();
    sc.epsilon = s.at("epsilon").get<double>();
    sc.m = cfg.game.m;
    cfg.game.scores = sc;
  }
  if (g.contains("derived")) {
    const json& d = g.at("derived");
    require_keys(d, {"alpha", "beta", "gamma", "offset"}, "game.derived");
    DerivedParams dp;
    dp.alpha = d.at("alpha").get<double>();
    dp.beta = d.at("beta").get<double>();
    dp.gamma = d.at("gamma").get<double>();
    dp.offset = d.value("offset", 0.0);
    cfg.game.derived = dp;
  }
  cfg.game.params();  // feasibility checked at load

  cfg.regularizer = parse_regularizer(j.at("regularizer").get<std::string>());
  if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode").get<std::string>());
  cfg.step = j.value("step", 0.02);
  cfg.horizon = j.at("horizon").get<double>();
  cfg.record_every = j.value("record_every", 1);

  const json& in = j.at("inits");
  require_keys(in, {"count", "seed", "kind", "profiles"}, "inits");
  const std::string kind = in.value("kind", "random_interior");
  cfg.inits.seed = in.value("seed", std::uint64_t{0});
  if (kind == "random_interior") {
    cfg.inits.kind = InitsConfig::Kind::RandomInterior;
    cfg.inits.count = in.value("count", 1);
    if (cfg.inits.count < 1)
      throw std::invalid_argument("config: inits.count must be >= 1");
  } else if (kind == "explicit") {
    cfg.inits.kind = InitsConfig::Kind::Explicit;
    const json& profiles = in.at("profiles");
    for (const json& p : profiles) {
      require_keys(p, {"x", "y", "z"}, "inits.profiles[]");
      cfg.inits.explicit_profiles.emplace_back(parse_strategy(p.at("x")),
                                               parse_strategy(p.at("y")),
                                               parse_strategy(p.at("z")));
    }
    if (cfg.inits.explicit_profiles.empty())
      throw std::invalid_argument("config: explicit inits need >= 1 profile");
    cfg.inits.count = static_cast<int>(cfg.inits.explicit_profiles.size());
  } else {
    throw std::invalid_argument(
        "config: inits.kind must be random_interior|explicit");
  }

  if (j.contains("outputs")) {
    const json& out = j.at("outputs");
    require_keys(out, {"trajectory_csv", "summary_json"}, "outputs");
    cfg.outputs.trajectory_csv = out.value("trajectory_csv", "");
    cfg.outputs.summary_json = out.value("summary_json", "");
  }
  cfg.integrator();  // validates step/horizon/mode combination
  return cfg;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") +
                                e.what());
  }
  return parse_experiment_config(j);
}

json experiment_config_to_json(const ExperimentConfig& cfg) {
  json g;
  g["m"] = cfg.game.m;
  if (cfg.game.scores) {
    g["scores"] = {{"a", cfg.game.scores->a},
                   {"b", cfg.game.scores->b},
                   {"c", cfg.game.scores->c},
                   {"epsilon", cfg.game.scores->epsilon}};
  }
  if (cfg.game.derived) {
    g["derived"] = {{"alpha", cfg.game.derived->alpha},
                    {"beta", cfg.game.derived->beta},
                    {"gamma", cfg.game.derived->gamma},
                    {"offset", cfg.game.derived->offset}};
  }
  json in;
  in["kind"] = cfg.inits.kind == InitsConfig::Kind::RandomInterior
                   ? "random_interior"
                   : "explicit";
  in["count"] = cfg.inits.count;
  in["seed"] = cfg.inits.seed;
  json j;
  j["game"] = g;
  j["regularizer"] = regularizer_name(cfg.regularizer);
  j["mode"] = mode_name(cfg.mode);
  j["step"] = cfg.step;
  j["horizon"] = cfg.horizon;
  j["record_every"] = cfg.record_every;
  j["inits"] = in;
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string dump = experiment_config_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a:%016" PRIx64, h);
  return buf;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  const int m = traj.initial.actions();
  os << "t";
  for (const char* p : {"x", "y", "z"})
    for (int i = 1; i <= m; ++i) os << "," << p << "_" << i;
  os << ",V,G\n";
  for (const TrajectorySample& s : traj.samples) {
    os << format17(s.t);
    for (const Strategy* st : {&s.profile.x, &s.profile.y, &s.profile.z})
      for (int i = 0; i < m; ++i) os << "," << format17((*st)[i]);
    os << "," << format17(s.V) << "," << format17(s.G) << "\n";
  }
}

namespace {

bool sample_interior(const TrajectorySample& s, double margin) {
  for (const Strategy* st : {&s.profile.x, &s.profile.y, &s.profile.z})
    for (int i = 0; i < st->size(); ++i)
      if ((*st)[i] < margin) return false;
  return true;
}

// Central-difference residuals of the recorded V and G series against the
// closed forms, restricted to interior samples (the closed forms assume the
// interior for the Euclidean regularizer).
void fd_residuals(const Trajectory& traj, InitResult& r) {
  const double dt = traj.config.step * traj.config.record_every;
  const bool vdot_supported =
      traj.initial.actions() == 2 ||
      traj.config.regularizer == Regularizer::Entropic;
  const double margin =
      traj.config.regularizer == Regularizer::Euclidean ? 1e-6 : 1e-12;
  double v_res = std::numeric_limits<double>::quiet_NaN();
  double g_res = std::numeric_limits<double>::quiet_NaN();
  for (size_t k = 1; k + 1 < traj.samples.size(); ++k) {
    const auto& prev = traj.samples[k - 1];
    const auto& mid = traj.samples[k];
    const auto& next = traj.samples[k + 1];
    // the final sample may sit off the recording stride
    if (std::abs((next.t - mid.t) - dt) > 1e-9 ||
        std::abs((mid.t - prev.t) - dt) > 1e-9)
      continue;
    if (!sample_interior(prev, margin) || !sample_interior(mid, margin) ||
        !sample_interior(next, margin))
      continue;
    const double gd = (next.G - prev.G) / (2.0 * dt);
    const double g_err = std::abs(gd - g_dot_analytic(mid.profile, traj.game));
    if (std::isnan(g_res) || g_err > g_res) g_res = g_err;
    if (vdot_supported) {
      const double vd = (next.V - prev.V) / (2.0 * dt);
      const double v_err = std::abs(
          vd - v_dot_analytic(mid.profile, traj.game, traj.config.regularizer));
      if (std::isnan(v_res) || v_err > v_res) v_res = v_err;
    }
  }
  r.max_vdot_residual = v_res;
  r.max_gdot_residual = g_res;
}

json init_result_to_json(const InitResult& r) {
  json j;
  j["seed"] = r.seed;
  j["label"] = regime_tag_name(r.label.tag);
  j["V_initial"] = r.v_initial;
  j["V_min"] = r.v_min;
  j["V_terminal"] = r.v_terminal;
  j["G_terminal"] = r.g_terminal;
  j["max_vdot_residual"] =
      std::isnan(r.max_vdot_residual) ? json() : json(r.max_vdot_residual);
  j["max_gdot_residual"] =
      std::isnan(r.max_gdot_residual) ? json() : json(r.max_gdot_residual);
  j["status"] = r.blew_up ? "blew_up" : (r.truncated ? "truncated" : "ok");
  return j;
}

fs::path resolve(const std::string& path, const std::string& out_dir) {
  fs::path p(path);
  if (p.is_absolute() || out_dir.empty()) return p;
  return fs::path(out_dir) / p;
}

std::string init_csv_path(const std::string& base, int index, int count) {
  if (count <= 1) return base;
  fs::path p(base);
  fs::path stem = p.stem();
  stem += "_init" + std::to_string(index);
  stem += p.extension();
  return (p.parent_path() / stem).string();
}

}  // namespace

SimulateOutcome run_simulate(const ExperimentConfig& cfg,
                             const std::string& out_dir) {
  const DerivedParams game = cfg.game.params();
  const IntegratorConfig ic = cfg.integrator();
  SimulateOutcome outcome;
  if (!out_dir.empty()) fs::create_directories(out_dir);

  for (int k = 0; k < cfg.inits.count; ++k) {
    const std::uint64_t init_seed = cfg.inits.seed + static_cast<std::uint64_t>(k);
    Profile initial = [&]() {
      if (cfg.inits.kind == InitsConfig::Kind::Explicit)
        return cfg.inits.explicit_profiles[static_cast<size_t>(k)];
      Rng rng(init_seed);
      return random_interior_profile(rng, cfg.game.m);
    }();

    Trajectory traj = simulate(initial, game, ic);
    InitResult r;
    r.seed = init_seed;
    r.truncated = traj.truncated;
    r.blew_up = traj.blew_up;
    r.v_initial = traj.samples.front().V;
    r.v_min = traj.samples.front().V;
    for (const TrajectorySample& s : traj.samples)
      r.v_min = std::min(r.v_min, s.V);
    r.v_terminal = traj.samples.back().V;
    r.g_terminal = traj.samples.back().G;
    if (traj.samples.size() >= 100)
      r.label = classify_trajectory(traj);
    else
      r.label.tag = RegimeTag::Mixed;
    fd_residuals(traj, r);
    if (traj.blew_up) outcome.exit_code = 3;

    if (!cfg.outputs.trajectory_csv.empty()) {
      const fs::path path = resolve(
          init_csv_path(cfg.outputs.trajectory_csv, k, cfg.inits.count),
          out_dir);
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      std::ofstream os(path);
      if (!os)
        throw std::runtime_error("cannot write trajectory CSV: " +
                                 path.string());
      write_trajectory_csv(traj, os);
    }
    outcome.per_init.push_back(std::move(r));
  }

  if (!cfg.outputs.summary_json.empty()) {
    const DerivedParams d = game;
    json summary;
    summary["game"] = {{"m", cfg.game.m},
                       {"alpha", d.alpha},
                       {"beta", d.beta},
                       {"gamma", d.gamma},
                       {"offset", d.offset}};
    summary["config_hash"] = config_hash(cfg);
    json per_init = json::array();
    for (const InitResult& r : outcome.per_init)
      per_init.push_back(init_result_to_json(r));
    summary["per_init"] = per_init;
    const fs::path path = resolve(cfg.outputs.summary_json, out_dir);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os)
      throw std::runtime_error("cannot write summary JSON: " + path.string());
    os << summary.dump(2) << "\n";
  }
  return outcome;
}

SweepOutcome run_sweep(const ExperimentConfig& base,
                       const std::vector<double>& alphas,
                       const std::vector<double>& gammas,
                       const std::string& out_dir) {
  if (alphas.empty() || gammas.empty())
    throw std::invalid_argument("sweep: empty grid");
  fs::create_directories(out_dir);

  struct Cell {
    double alpha, gamma;
    std::string dir;
  };
  std::vector<Cell> cells;
  for (double a : alphas)
    for (double g : gammas) {
      char name[64];
      std::snprintf(name, sizeof(name), "a%g_g%g", a, g);
      cells.push_back({a, g, name});
    }

  auto run_cell = [&](const Cell& cell) {
    SweepCellResult res;
    res.alpha = cell.alpha;
    res.gamma = cell.gamma;
    res.dir = cell.dir;
    try {
      ExperimentConfig cfg = base;
      if (cfg.game.scores) {
        // keep the cell on the requested score sheet: rebuild scores from
        // (alpha, gamma) with the base beta and offset
        const DerivedParams b = derive_params(*cfg.game.scores);
        cfg.game.scores = scores_from_derived(cell.alpha, b.beta, cell.gamma,
                                              b.offset, cfg.game.m);
        cfg.game.derived.reset();
      } else {
        DerivedParams d = *cfg.game.derived;
        d.alpha = cell.alpha;
        d.gamma = cell.gamma;
        d.validate();
        cfg.game.derived = d;
      }
      if (cfg.outputs.trajectory_csv.empty())
        cfg.outputs.trajectory_csv = "trajectory.csv";
      if (cfg.outputs.summary_json.empty())
        cfg.outputs.summary_json = "summary.json";
      const std::string cell_dir = (fs::path(out_dir) / cell.dir).string();
      SimulateOutcome out = run_simulate(cfg, cell_dir);
      res.per_init = std::move(out.per_init);
      res.status = out.exit_code == 0 ? "ok" : "blow_up";
    } catch (const std::invalid_argument& e) {
      res.status = std::string("infeasible: ") + e.what();
    } catch (const std::exception& e) {
      res.status = std::string("error: ") + e.what();
    }
    return res;
  };

  // cells run concurrently in hardware-sized waves; results keep grid order
  std::vector<SweepCellResult> results(cells.size());
  const size_t wave =
      std::max<size_t>(1, std::thread::hardware_concurrency());
  for (size_t start = 0; start < cells.size(); start += wave) {
    const size_t end = std::min(cells.size(), start + wave);
    std::vector<std::future<SweepCellResult>> futures;
    for (size_t i = start; i < end; ++i)
      futures.push_back(std::async(std::launch::async, run_cell, cells[i]));
    for (size_t i = start; i < end; ++i)
      results[i] = futures[i - start].get();
  }

  SweepOutcome outcome;
  bool any_ok = false;
  json index_cells = json::array();
  for (SweepCellResult& res : results) {
    json cell;
    cell["alpha"] = res.alpha;
    cell["gamma"] = res.gamma;
    cell["dir"] = res.dir;
    cell["status"] = res.status;
    json hist = json::object();
    for (const InitResult& r : res.per_init) {
      const std::string name = regime_tag_name(r.label.tag);
      hist[name] = hist.value(name, 0) + 1;
    }
    cell["labels"] = hist;
    index_cells.push_back(cell);
    if (res.status == "ok") any_ok = true;
    outcome.cells.push_back(std::move(res));
  }
  outcome.exit_code = any_ok ? 0 : 3;

  json index;
  index["base_config_hash"] = config_hash(base);
  index["cells"] = index_cells;
  std::ofstream os(fs::path(out_dir) / "index.json");
  if (!os) throw std::runtime_error("cannot write sweep index");
  os << index.dump(2) << "\n";
  return outcome;
}

}  // namespace m3ma
