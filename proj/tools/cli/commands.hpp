#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "physattn/container_io.hpp"
#include "physattn/harness.hpp"
#include "physattn/metrics.hpp"

namespace physattn::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;  ///< config, parse, shape, domain or I/O error
inline constexpr int kExitDiverged = 2;

struct OperateResult {
  io::Container output;
  double energy_before = 0.0;
  double energy_after = 0.0;
};

/// run_physics_operator on file data with the config's alpha, prior and
/// schedule. The random stream is (first seed, "operate").
[[nodiscard]] OperateResult cmd_operate(const io::Container& features, const io::Container& masks,
                                        const ExperimentConfig& cfg);

struct ExperimentOutput {
  std::vector<harness::RunRecord> records;
  std::string csv;
  std::string svg;
  std::string summary;  ///< JSON
};

/// ablation_priors over every configured seed: one CSV row per (seed, prior),
/// bar chart of mean R_t and S_t per prior.
[[nodiscard]] ExperimentOutput cmd_ablate(const ExperimentConfig& cfg, std::size_t threads);

/// sweep_alpha over every configured seed: one CSV row per (seed, alpha),
/// normalized R_t / D_t / S_t polylines against alpha.
[[nodiscard]] ExperimentOutput cmd_sweep(const ExperimentConfig& cfg, std::size_t threads);

[[nodiscard]] metrics::MetricReport cmd_metrics(const io::Container& features, const ExperimentConfig& cfg);

/// Column names shared by the ablation and sweep CSV files.
[[nodiscard]] std::vector<std::string> run_csv_header();

/// Full command line: parses flags, runs the command, writes files, prints
/// to `out`, reports errors on `err` and returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace physattn::cli
