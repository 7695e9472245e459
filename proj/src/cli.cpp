#include "spinfe/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "spinfe/cascade.hpp"
#include "spinfe/config.hpp"
#include "spinfe/errors.hpp"
#include "spinfe/free_energy_mc.hpp"
#include "spinfe/parisi_pde.hpp"
#include "spinfe/rng.hpp"
#include "spinfe/variational.hpp"

namespace spinfe {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string metadata_block(const ModelConfig& cfg) {
  std::ostringstream out;
  out << "# config_hash=" << config_hash(cfg.raw) << "\n";
  out << "# seed=" << cfg.seed << "\n";
  out << "# config=" << cfg.raw.dump() << "\n";
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& content, bool quiet) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
  out << content;
  if (!quiet) std::cout << content;
}

json measure_to_json(const DiscreteMeasure& m) {
  json atoms = json::array();
  for (const auto& a : m.atoms()) atoms.push_back({a.location, a.weight});
  return json{{"atoms", atoms}};
}

json result_to_json(const VariationalResult& r) {
  json j{{"value", r.value},
         {"argmin", measure_to_json(r.argmin)},
         {"converged", r.converged},
         {"restarts", r.restarts},
         {"evaluations", r.evaluations}};
  if (std::isfinite(r.arg_scalar)) j["arg_scalar"] = r.arg_scalar;
  return j;
}

std::string json_output(const ModelConfig& cfg, json j) {
  j["config_hash"] = config_hash(cfg.raw);
  j["seed"] = cfg.seed;
  j["config"] = cfg.raw;
  return j.dump(2) + "\n";
}

// Limit value matching the fe-mc parameters, chosen per regime.
double fe_target(const ModelConfig& cfg) {
  if (cfg.s == 0.0 && cfg.t == 0.0) return psi_capital(cfg.mu, cfg.h, cfg.base, cfg.pde);
  if (cfg.s == 0.0) {
    OptimizerConfig opt = cfg.optimizer;
    const BaseMeasure tilted = cfg.base.tilted(cfg.h);
    return hopf_lax_value(cfg.mixture, cfg.mu, cfg.t, tilted, opt).value +
           cfg.base.log_tilt_mass(cfg.h);
  }
  if (cfg.t > 0.0)
    return theorem2_value(cfg.mixture, cfg.mu, cfg.s, cfg.t, cfg.h, cfg.base, cfg.optimizer)
        .value;
  return std::numeric_limits<double>::quiet_NaN();
}

int cmd_parisi_eval(const ModelConfig& cfg, const std::filesystem::path& out_dir, bool quiet) {
  const DiscreteMeasure& nu = cfg.nu ? *cfg.nu : cfg.mu;
  const ParisiValue pv = parisi_value(nu, cfg.lambda, cfg.base, cfg.pde);
  write_file(out_dir / "parisi_eval.json",
             json_output(cfg, json{{"value", pv.value}, {"err_estimate", pv.err_estimate}}),
             quiet);
  return 0;
}

int cmd_cascade_check(const ModelConfig& cfg, const std::filesystem::path& out_dir, bool quiet) {
  std::ostringstream csv;
  csv << "quantity,mc_mean,mc_stderr,exact_or_pde_value\n";

  const std::vector<double> zetas = cfg.mu.interior_levels();
  const int k = static_cast<int>(zetas.size());

  // overlap law: per-level frequency of the common-ancestor depth
  {
    std::vector<RunningStat> freq(k + 1);
    const int pair_draws = 200;
    for (int r = 0; r < cfg.reps; ++r) {
      const CascadeTree tree = sample_cascade(zetas, cfg.branching, substream(cfg.seed, r));
      std::vector<double> cum(tree.leaves());
      double acc = 0.0;
      for (std::size_t i = 0; i < tree.leaves(); ++i) {
        acc += std::exp(tree.leaf_log_weights[i]);
        cum[i] = acc;
      }
      auto rng = make_stream(cfg.seed, 1000000 + r);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      std::vector<int> counts(k + 1, 0);
      for (int q = 0; q < pair_draws; ++q) {
        auto draw = [&]() {
          return static_cast<std::size_t>(
              std::lower_bound(cum.begin(), cum.end(), unif(rng) * acc) - cum.begin());
        };
        ++counts[tree.overlap_depth(draw(), draw())];
      }
      for (int l = 0; l <= k; ++l)
        freq[l].add(static_cast<double>(counts[l]) / pair_draws);
    }
    for (int l = 0; l <= k; ++l) {
      csv << "overlap_level_" << l << "," << fmt(freq[l].mean()) << ","
          << fmt(freq[l].standard_error()) << "," << fmt(cfg.mu.atoms()[l].weight) << "\n";
    }
  }

  // cascade log-partition with the theta covariance of mu taken as the
  // overlap law
  {
    HierGaussianSpec spec;
    for (const auto& a : cfg.mu.atoms()) spec.levels.push_back(cfg.mixture.theta(a.location));
    CascadeTree proto;
    proto.zetas = zetas;
    proto.branching = cfg.branching;
    proto.seed = substream(cfg.seed, 2);
    const McEstimate est = cascade_log_partition(proto, spec, cfg.reps);
    csv << "log_partition_theta," << fmt(est.mean) << "," << fmt(est.se) << ","
        << fmt(cascade_log_partition_exact(zetas, spec)) << "\n";
  }

  // psi via cascade against the PDE value
  {
    const McEstimate est =
        psi_via_cascade(cfg.mu, cfg.base, cfg.branching, cfg.reps, substream(cfg.seed, 3));
    csv << "psi_cascade," << fmt(est.mean) << "," << fmt(est.se) << ","
        << fmt(psi(cfg.mu, cfg.base, cfg.pde)) << "\n";
  }

  csv << metadata_block(cfg);
  write_file(out_dir / "cascade_check.csv", csv.str(), quiet);
  return 0;
}

int cmd_fe_mc(const ModelConfig& cfg, const std::filesystem::path& out_dir, bool quiet,
              bool single_n) {
  const double target = fe_target(cfg);
  std::vector<int> ladder = single_n ? std::vector<int>{cfg.n} : cfg.n_ladder;
  std::ostringstream csv;
  csv << "n,mean,stderr,target_value\n";
  for (int n : ladder) {
    const ModelInstance model(
        ModelParams{n, cfg.mixture, cfg.base, cfg.mu, cfg.t, cfg.s, cfg.h});
    const FreeEnergyEstimate est =
        (cfg.s != 0.0 || cfg.h != 0.0)
            ? estimate_F_sth(model, cfg.reps, cfg.branching, cfg.seed)
            : estimate_F(model, cfg.reps, cfg.branching, cfg.seed);
    csv << n << "," << fmt(est.mean) << "," << fmt(est.se) << "," << fmt(target) << "\n";
  }
  csv << metadata_block(cfg);
  write_file(out_dir / "fe_mc.csv", csv.str(), quiet);
  return 0;
}

int cmd_hopf_lax(const ModelConfig& cfg, const std::filesystem::path& out_dir, bool quiet) {
  const VariationalResult r =
      hopf_lax_value(cfg.mixture, cfg.mu, cfg.t, cfg.base, cfg.optimizer);
  write_file(out_dir / "hopf_lax.json", json_output(cfg, result_to_json(r)), quiet);
  return r.converged ? 0 : 2;
}

int cmd_parisi_classical(const ModelConfig& cfg, const std::filesystem::path& out_dir,
                         bool quiet) {
  const VariationalResult r = classical_parisi_value(cfg.mixture, cfg.mu, cfg.base,
                                                     cfg.optimizer);
  json j = result_to_json(r);
  j["u_star"] = r.arg_scalar;
  write_file(out_dir / "parisi_classical.json", json_output(cfg, std::move(j)), quiet);
  return r.converged ? 0 : 2;
}

int cmd_theorem2(const ModelConfig& cfg, const std::filesystem::path& out_dir, bool quiet) {
  const VariationalResult r =
      theorem2_value(cfg.mixture, cfg.mu, cfg.s, cfg.t, cfg.h, cfg.base, cfg.optimizer);
  json j = result_to_json(r);
  j["h_star"] = r.arg_scalar;
  j["bracket_edge"] = r.bracket_edge;
  write_file(out_dir / "theorem2.json", json_output(cfg, std::move(j)), quiet);
  return r.converged ? 0 : 2;
}

int cmd_hj_grid(const ModelConfig& cfg, const std::filesystem::path& out_dir, bool quiet) {
  std::vector<double> s_values, h_values;
  for (double s = cfg.hj.s_min; s <= cfg.hj.s_max + 1e-12; s += cfg.hj.step)
    s_values.push_back(s);
  for (double h = cfg.hj.h_min; h <= cfg.hj.h_max + 1e-12; h += cfg.hj.step)
    h_values.push_back(h);
  const FGrid grid =
      theorem2_grid(cfg.mixture, cfg.mu, cfg.t, cfg.base, cfg.optimizer, s_values, h_values);
  const HjCheckResult check = hj_check(grid, cfg.mixture);
  std::ostringstream csv;
  csv << "s,h,f,residual,flagged\n";
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    for (std::size_t j = 0; j < h_values.size(); ++j) {
      const double res = check.residual[i][j];
      const bool flagged =
          std::isfinite(res) && std::abs(res) > check.flag_tol;
      csv << fmt(s_values[i]) << "," << fmt(h_values[j]) << "," << fmt(grid.f[i][j]) << ","
          << fmt(res) << "," << (flagged ? 1 : 0) << "\n";
    }
  }
  csv << metadata_block(cfg);
  write_file(out_dir / "hj_grid.csv", csv.str(), quiet);
  return 0;
}

int cmd_compare(const ModelConfig& cfg, const std::filesystem::path& out_dir, bool quiet) {
  const VariationalResult hl = hopf_lax_value(cfg.mixture, cfg.mu, cfg.t, cfg.base,
                                              cfg.optimizer);
  const VariationalResult cp = classical_parisi_value(cfg.mixture, cfg.mu, cfg.base,
                                                      cfg.optimizer);
  std::ostringstream csv;
  csv << "n,mc_mean,mc_stderr,hopf_lax,classical,formula_abs_diff,mc_gap\n";
  for (int n : cfg.n_ladder) {
    const ModelInstance model(
        ModelParams{n, cfg.mixture, cfg.base, cfg.mu, cfg.t, cfg.s, cfg.h});
    const FreeEnergyEstimate est = estimate_F(model, cfg.reps, cfg.branching, cfg.seed);
    csv << n << "," << fmt(est.mean) << "," << fmt(est.se) << "," << fmt(hl.value) << ","
        << fmt(cp.value) << "," << fmt(std::abs(hl.value - cp.value)) << ","
        << fmt(std::abs(est.mean - hl.value)) << "\n";
  }
  csv << metadata_block(cfg);
  write_file(out_dir / "compare.csv", csv.str(), quiet);
  return hl.converged && cp.converged ? 0 : 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"mean-field spin-glass free energy toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", mu_file;
  bool quiet = false;
  std::optional<std::uint64_t> seed_flag;
  std::optional<int> reps_flag, n_flag, branches_flag;
  std::optional<double> t_flag, s_flag, h_flag;

  app.add_option("--config", config_path, "model config JSON")->required();
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--seed", seed_flag, "seed override");
  app.add_option("--reps", reps_flag, "replication count override");
  app.add_flag("--quiet", quiet, "suppress stdout echo");

  const std::vector<std::string> names = {"parisi-eval", "cascade-check",     "fe-mc",
                                          "hopf-lax",    "parisi-classical", "theorem2",
                                          "hj-grid",     "compare"};
  for (const auto& name : names) app.add_subcommand(name);
  CLI::App* fe = app.get_subcommand("fe-mc");
  fe->add_option("--N", n_flag, "single system size (overrides the ladder)");
  fe->add_option("--t", t_flag, "time parameter");
  fe->add_option("--s", s_flag, "s parameter");
  fe->add_option("--h", h_flag, "h parameter");
  fe->add_option("--mu-file", mu_file, "JSON file with {\"atoms\": [[q, w], ...]}");
  fe->add_option("--branches", branches_flag, "cascade branching factor");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 1;
  }

  try {
    ModelConfig cfg = load_model_config(config_path);
    if (seed_flag) {
      cfg.seed = *seed_flag;
      cfg.optimizer.seed = *seed_flag;
      cfg.raw["seed"] = *seed_flag;
    }
    if (reps_flag) cfg.reps = *reps_flag;
    if (n_flag) cfg.n = *n_flag;
    if (t_flag) cfg.t = *t_flag;
    if (s_flag) cfg.s = *s_flag;
    if (h_flag) cfg.h = *h_flag;
    if (branches_flag) cfg.branching = *branches_flag;
    if (!mu_file.empty()) {
      std::ifstream in(mu_file);
      if (!in) throw ConfigError("cannot open mu file '" + mu_file + "'");
      nlohmann::json j = nlohmann::json::parse(in);
      std::vector<DiscreteMeasure::Atom> atoms;
      for (const auto& entry : j.at("atoms"))
        atoms.push_back({entry[0].get<double>(), entry[1].get<double>()});
      cfg.mu = DiscreteMeasure(std::move(atoms));
    }

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);

    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "parisi-eval") return cmd_parisi_eval(cfg, dir, quiet);
    if (sub == "cascade-check") return cmd_cascade_check(cfg, dir, quiet);
    if (sub == "fe-mc") return cmd_fe_mc(cfg, dir, quiet, n_flag.has_value());
    if (sub == "hopf-lax") return cmd_hopf_lax(cfg, dir, quiet);
    if (sub == "parisi-classical") return cmd_parisi_classical(cfg, dir, quiet);
    if (sub == "theorem2") return cmd_theorem2(cfg, dir, quiet);
    if (sub == "hj-grid") return cmd_hj_grid(cfg, dir, quiet);
    if (sub == "compare") return cmd_compare(cfg, dir, quiet);
    std::cerr << "unknown subcommand '" << sub << "'\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace spinfe
