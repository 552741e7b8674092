#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "physattn/errors.hpp"
#include "physattn/harness.hpp"
#include "physattn/metrics.hpp"
#include "physattn/params.hpp"
#include "physattn/priors.hpp"

namespace physattn::cli {

/// Invalid experiment configuration: unknown key, wrong type, or a value
/// rejected by the module it configures.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Everything an experiment command needs, loaded from one JSON document.
/// Every key is optional; absent keys keep the defaults below.
///
///   {
///     "scenario": {"frames": 8, "height": 8, ..., "attention_mix": 0.5},
///     "constants": {"c_heat": 2, "c_id": 1, "c_s": 0.1, "c_b": 0.1},
///     "alpha": 0.5,
///     "prior": {"kind": "heat", "wave_c": null, "elastic_c": null,
///               "flux": "linear", "speed": 1, "insulated": true},
///     "schedule": {"n_iters": 10, "dtau": 0.1},
///     "metrics": {"gamma_r": 0.1, "gamma_d": 0.1, "p": 4, "cosine": false},
///     "steps": 20,
///     "alphas": [0, 0.25, 0.5, 0.75, 1],
///     "seeds": [1, 2, ..., 20],
///     "output_dir": "out"
///   }
struct ExperimentConfig {
  harness::ScenarioParams scenario;
  BaseConstants constants;
  double alpha = 0.5;
  priors::PriorSpec prior;
  std::size_t n_iters = 10;
  double dtau = 0.1;
  metrics::MetricConfig metrics;
  bool cosine = false;
  std::size_t steps = 20;
  std::vector<double> alphas{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<std::uint64_t> seeds = default_seeds();
  std::string output_dir = "out";

  [[nodiscard]] static std::vector<std::uint64_t> default_seeds();

  [[nodiscard]] ControlParams params() const { return derive_params(alpha, constants); }
  [[nodiscard]] OperatorSchedule schedule() const { return OperatorSchedule(n_iters, dtau); }

  /// Re-runs every module-level check; throws ConfigError naming the field.
  void validate() const;
};

/// Strict parse: syntax errors raise ParseError with line, column and byte
/// offset; unknown keys and wrong types raise ConfigError.
[[nodiscard]] ExperimentConfig parse_config(std::string_view text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace physattn::cli
