#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cocyclelab/base_dynamics.hpp"
#include "cocyclelab/cocycle.hpp"

namespace cocyclelab {

enum class Experiment {
  Spectrum,
  Splitting,
  Dichotomy,
  Solve,
  OracleCompare,
  Mane,
  Induce,
  Witness,
  Robustness,
  Report,
  Birkhoff,
};

Experiment parse_experiment(std::string_view name);
std::string_view experiment_name(Experiment e);

/// Run configuration. Text form: one `key = value` per line, values in JSON
/// (bare words are accepted for string keys), `#` starts a comment.
struct RunConfig {
  Experiment experiment = Experiment::Spectrum;

  std::string base = "rotation";  ///< rotation | bernoulli | periodic
  std::vector<double> base_params;
  std::string cocycle = "diagonal";
  std::vector<double> cocycle_params{2.0, 0.5};
  std::optional<std::uint64_t> seed;

  // spectrum / splitting
  std::int64_t steps = 10000;
  std::int64_t reorth = 10;
  double gap_tol = 0.02;
  double zero_tol = 0.02;
  std::int64_t samples = 8;
  std::int64_t splitting_window = 400;

  // dichotomy / solve
  std::int64_t window = 100;
  std::int64_t n_tail = 60;
  std::int64_t n_max = 200;
  std::int64_t warmup = 0;
  double cert_safety = 0.25;
  std::optional<double> rate;
  std::optional<double> epsilon;  ///< envelope epsilon, default rate / 3
  std::vector<std::int64_t> horizons{10, 50, 100};
  double slack = 1.05;
  double tol = 1e-10;

  // oracle-compare
  std::int64_t period = 0;     ///< 0 draws p in [1, 8] per instance
  std::int64_t dimension = 0;  ///< 0 draws d in [1, 4] per instance

  // mane / witness / induce / birkhoff
  double target = 3.0;
  double ratio = 10.0;
  double weight = 1.0;
  bool weighted_output = false;
  /// Arc [lo, hi), cylinder word at index 0, or periodic states; empty picks
  /// [0, 1/2), the word [0] or the state 0.
  std::vector<double> set;
  std::int64_t set_samples = 4000;  ///< draws for the empirical measure of the set
  std::int64_t horizon = 100000;
  std::int64_t search_horizon = 200;
  std::int64_t grid = 720;
  std::int64_t rokhlin_samples = 2000;

  // robustness
  std::int64_t trials = 20;
  double safety = 0.5;
  std::int64_t max_iters = 200;

  // report
  std::string source;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ConfigError with the line number on syntax errors, unknown or
/// repeated keys, ill-typed values and unknown experiment names.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
/// Every key, in a fixed order; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);
/// Sets one key from its JSON text (the same rules as a config line).
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);
std::vector<std::string> config_keys();

/// Range checks (tolerances > 0, sizes positive, seed present). ConfigError.
void validate(const RunConfig& config);

BaseSystem make_base(const RunConfig& config);
CocyclePtr make_cocycle(const RunConfig& config, const BaseSystem& base);
/// The `set` key read as an arc (rotation) or a cylinder word (Bernoulli).
SetIndicator make_set(const RunConfig& config, const BaseSystem& base);

}  // namespace cocyclelab
