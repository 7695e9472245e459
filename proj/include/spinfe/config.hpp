#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "spinfe/base_measure.hpp"
#include "spinfe/discrete_measure.hpp"
#include "spinfe/mixture.hpp"
#include "spinfe/parisi_pde.hpp"
#include "spinfe/variational.hpp"

namespace spinfe {

struct HjGridSpec {
  double s_min = 0.6, s_max = 1.0;
  double h_min = -0.2, h_max = 0.2;
  double step = 0.05;
};

// Parsed model configuration.  mixture, base_measure and mu are required;
// everything else has defaults.  Parse failures throw ConfigError naming the
// offending field.
struct ModelConfig {
  MixtureFunction mixture;
  BaseMeasure base;
  DiscreteMeasure mu;
  std::optional<DiscreteMeasure> nu;  // candidate measure for parisi-eval
  double lambda = 0.0;
  double t = 1.0;
  double s = 0.0;
  double h = 0.0;
  double u = 1.0;
  double eps = 0.05;
  int n = 4;
  std::vector<int> n_ladder{4, 8, 12};
  int reps = 200;
  int branching = 1000;
  std::uint64_t seed = 1;
  PdeConfig pde;
  OptimizerConfig optimizer;
  HjGridSpec hj;
  nlohmann::json raw;
};

ModelConfig parse_model_config(const nlohmann::json& j);
ModelConfig load_model_config(const std::string& path);

// FNV-1a hash of the canonical dump, 16 hex characters.
std::string config_hash(const nlohmann::json& j);

}  // namespace spinfe
