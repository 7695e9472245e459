#include "spinfe/config.hpp"

#include <fstream>
#include <stdexcept>

#include "spinfe/errors.hpp"

namespace spinfe {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

const json& require(const json& j, const std::string& field) {
  const auto it = j.find(field);
  if (it == j.end()) throw ConfigError("config: missing required field '" + field + "'");
  return *it;
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

MixtureFunction parse_mixture(const json& j) {
  if (!j.is_array() || j.empty()) fail("mixture", "expected a nonempty array of [p, beta_sq]");
  std::vector<MixtureFunction::Term> terms;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 2) fail("mixture", "entries must be [p, beta_sq]");
    const double p = as_number(entry[0], "mixture[i][0]");
    if (p != static_cast<int>(p)) fail("mixture", "exponent p must be an integer");
    terms.push_back({static_cast<int>(p), as_number(entry[1], "mixture[i][1]")});
  }
  try {
    return MixtureFunction(std::move(terms));
  } catch (const std::exception& e) {
    fail("mixture", e.what());
  }
}

BaseMeasure parse_base(const json& j) {
  if (j.is_object() && j.contains("preset")) {
    const std::string preset = j["preset"].get<std::string>();
    if (preset == "ising") return BaseMeasure::ising();
    fail("base_measure.preset", "unknown preset '" + preset + "'");
  }
  if (!j.is_object() || !j.contains("points"))
    fail("base_measure", "expected {\"preset\": ...} or {\"points\": [[sigma, prob], ...]}");
  std::vector<BaseMeasure::Point> pts;
  for (const auto& entry : j["points"]) {
    if (!entry.is_array() || entry.size() != 2)
      fail("base_measure.points", "entries must be [sigma, prob]");
    pts.push_back({as_number(entry[0], "base_measure.points[i][0]"),
                   as_number(entry[1], "base_measure.points[i][1]")});
  }
  try {
    return BaseMeasure(std::move(pts));
  } catch (const std::exception& e) {
    fail("base_measure.points", e.what());
  }
}

DiscreteMeasure parse_measure(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("atoms")) fail(field, "expected {\"atoms\": [[q, w], ...]}");
  std::vector<DiscreteMeasure::Atom> atoms;
  for (const auto& entry : j["atoms"]) {
    if (!entry.is_array() || entry.size() != 2) fail(field + ".atoms", "entries must be [q, w]");
    atoms.push_back({as_number(entry[0], field + ".atoms[i][0]"),
                     as_number(entry[1], field + ".atoms[i][1]")});
  }
  try {
    return DiscreteMeasure(std::move(atoms));
  } catch (const std::exception& e) {
    fail(field + ".atoms", e.what());
  }
}

void parse_solver(const json& j, PdeConfig* pde) {
  if (j.contains("quad_order")) pde->quad_order = j["quad_order"].get<int>();
  if (j.contains("x_step")) pde->x_step = as_number(j["x_step"], "solver.x_step");
  if (j.contains("x_halfwidth"))
    pde->x_halfwidth = as_number(j["x_halfwidth"], "solver.x_halfwidth");
  if (j.contains("max_err")) pde->max_err = as_number(j["max_err"], "solver.max_err");
  if (j.contains("interpolation") && j["interpolation"].get<std::string>() != "cubic")
    fail("solver.interpolation", "only 'cubic' is supported");
  if (pde->quad_order < 8) fail("solver.quad_order", "must be >= 8");
  if (!(pde->x_step > 0.0)) fail("solver.x_step", "must be > 0");
}

void parse_optimizer(const json& j, OptimizerConfig* opt) {
  if (j.contains("n_atoms")) opt->n_atoms = j["n_atoms"].get<int>();
  if (j.contains("multistarts")) opt->multistarts = j["multistarts"].get<int>();
  if (j.contains("nm_max_iter")) opt->nm_max_iter = j["nm_max_iter"].get<int>();
  if (j.contains("nm_tol")) opt->nm_tol = as_number(j["nm_tol"], "optimizer.nm_tol");
  if (j.contains("golden_tol"))
    opt->golden_tol = as_number(j["golden_tol"], "optimizer.golden_tol");
  if (j.contains("u_grid")) opt->u_grid = j["u_grid"].get<int>();
  if (j.contains("project_dominating"))
    opt->project_dominating = j["project_dominating"].get<bool>();
  if (opt->n_atoms < 1) fail("optimizer.n_atoms", "must be >= 1");
  if (opt->multistarts < 1) fail("optimizer.multistarts", "must be >= 1");
  if (!(opt->nm_tol > 0.0)) fail("optimizer.nm_tol", "must be > 0");
  if (!(opt->golden_tol > 0.0)) fail("optimizer.golden_tol", "must be > 0");
  if (opt->u_grid < 2) fail("optimizer.u_grid", "must be >= 2");
}

}  // namespace

ModelConfig parse_model_config(const nlohmann::json& j) {
  ModelConfig cfg{parse_mixture(require(j, "mixture")), parse_base(require(j, "base_measure")),
                  parse_measure(require(j, "mu"), "mu")};
  cfg.raw = j;
  if (j.contains("nu")) cfg.nu = parse_measure(j["nu"], "nu");
  if (j.contains("lambda")) cfg.lambda = as_number(j["lambda"], "lambda");
  if (j.contains("t")) cfg.t = as_number(j["t"], "t");
  if (j.contains("s")) cfg.s = as_number(j["s"], "s");
  if (j.contains("h")) cfg.h = as_number(j["h"], "h");
  if (j.contains("u")) cfg.u = as_number(j["u"], "u");
  if (j.contains("eps")) cfg.eps = as_number(j["eps"], "eps");
  if (j.contains("n")) cfg.n = j["n"].get<int>();
  if (j.contains("n_ladder")) {
    cfg.n_ladder.clear();
    for (const auto& v : j["n_ladder"]) cfg.n_ladder.push_back(v.get<int>());
    if (cfg.n_ladder.empty()) fail("n_ladder", "must not be empty");
  }
  if (j.contains("reps")) cfg.reps = j["reps"].get<int>();
  if (j.contains("branches")) cfg.branching = j["branches"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("solver")) parse_solver(j["solver"], &cfg.pde);
  if (j.contains("optimizer")) parse_optimizer(j["optimizer"], &cfg.optimizer);
  if (j.contains("hj_grid")) {
    const auto& g = j["hj_grid"];
    if (g.contains("s")) {
      cfg.hj.s_min = as_number(g["s"][0], "hj_grid.s[0]");
      cfg.hj.s_max = as_number(g["s"][1], "hj_grid.s[1]");
    }
    if (g.contains("h")) {
      cfg.hj.h_min = as_number(g["h"][0], "hj_grid.h[0]");
      cfg.hj.h_max = as_number(g["h"][1], "hj_grid.h[1]");
    }
    if (g.contains("step")) cfg.hj.step = as_number(g["step"], "hj_grid.step");
    if (!(cfg.hj.step > 0.0)) fail("hj_grid.step", "must be > 0");
    if (!(cfg.hj.s_min > 0.0)) fail("hj_grid.s", "s range must be > 0");
  }
  if (cfg.reps < 2) fail("reps", "must be >= 2");
  if (cfg.n < 1) fail("n", "must be >= 1");
  cfg.optimizer.pde = cfg.pde;
  cfg.optimizer.seed = cfg.seed;
  return cfg;
}

ModelConfig load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_model_config(j);
}

std::string config_hash(const nlohmann::json& j) {
  const std::string dump = j.dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[hash & 0xF];
    hash >>= 4;
  }
  return out;
}

}  // namespace spinfe
