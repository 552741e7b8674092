#include "commands.hpp"

#include <map>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "physattn/errors.hpp"
#include "physattn/parallel.hpp"
#include "physattn/priors.hpp"
#include "physattn/report.hpp"
#include "physattn/rng.hpp"
#include "svg.hpp"

namespace physattn::cli {

namespace {

using nlohmann::ordered_json;

std::string run_id(const harness::RunRecord& r) {
  return r.scenario_id + "/" + std::string(priors::label(r.prior.kind)) + "/alpha-" +
         report::format_number(r.alpha, 6);
}

std::string csv_row(const harness::RunRecord& r) {
  std::vector<std::string> fields;
  if (r.diverged) {
    fields = {run_id(r), report::format_number(r.alpha), std::string(priors::label(r.prior.kind)), "", "", "",
              "",        "",                            "",                                       "", std::to_string(r.seed)};
    fields.insert(fields.end(), {"diverged", "", "", ""});
  } else {
    fields = report::metric_csv_fields(run_id(r), r.alpha, priors::label(r.prior.kind), r.final_report, r.seed);
    fields.insert(fields.end(), {"ok", report::format_number(r.mean_mask_iou),
                                 report::format_number(r.background_change),
                                 report::format_number(r.subject_spread)});
  }
  return report::csv_line(fields);
}

std::string records_csv(const std::vector<harness::RunRecord>& records) {
  std::string out = report::csv_line(run_csv_header());
  for (const auto& r : records) out += csv_row(r);
  return out;
}

/// Means over the non-diverged records of one arm.
struct ArmSummary {
  std::size_t runs = 0;
  std::size_t diverged = 0;
  double r = 0.0;
  double d = 0.0;
  double s = 0.0;
  double background_change = 0.0;
  double subject_spread = 0.0;

  void add(const harness::RunRecord& rec) {
    ++runs;
    if (rec.diverged) {
      ++diverged;
      return;
    }
    r += rec.final_report.r;
    d += rec.final_report.d;
    s += rec.final_report.s;
    background_change += rec.background_change;
    subject_spread += rec.subject_spread;
  }

  [[nodiscard]] std::size_t completed() const { return runs - diverged; }
  [[nodiscard]] double mean(double total) const {
    return completed() == 0 ? 0.0 : total / static_cast<double>(completed());
  }

  [[nodiscard]] ordered_json to_json() const {
    ordered_json j;
    j["runs"] = runs;
    j["diverged"] = diverged;
    if (completed() == 0) {
      j["mean_R"] = j["mean_D"] = j["mean_S"] = nullptr;
      j["mean_background_change"] = j["mean_subject_spread"] = nullptr;
    } else {
      j["mean_R"] = mean(r);
      j["mean_D"] = mean(d);
      j["mean_S"] = mean(s);
      j["mean_background_change"] = mean(background_change);
      j["mean_subject_spread"] = mean(subject_spread);
    }
    return j;
  }
};

ordered_json summary_head(const char* command, const ExperimentConfig& cfg) {
  ordered_json j;
  j["command"] = command;
  j["steps"] = cfg.steps;
  j["seeds"] = cfg.seeds;
  j["n_iters"] = cfg.n_iters;
  j["dtau"] = cfg.dtau;
  return j;
}

}  // namespace

std::vector<std::string> run_csv_header() {
  auto header = report::metric_csv_header();
  header.insert(header.end(), {"status", "mask_iou", "background_change", "subject_spread"});
  return header;
}

OperateResult cmd_operate(const io::Container& features, const io::Container& masks,
                          const ExperimentConfig& cfg) {
  io::validate_pair(features, masks);
  const FeatureSequence state = io::to_features(features);
  const MaskSequence mask_seq = io::to_masks(masks);
  const ControlParams params = cfg.params();
  const RngHandle rng(cfg.seeds.empty() ? 0 : cfg.seeds.front(), "operate");
  const FeatureSequence out =
      priors::run_physics_operator(state, mask_seq, cfg.prior, params, cfg.schedule(), &rng);
  OperateResult result;
  result.energy_before = priors::sequence_energy(state);
  result.energy_after = priors::sequence_energy(out);
  result.output = io::to_container(out);
  return result;
}

ExperimentOutput cmd_ablate(const ExperimentConfig& cfg, std::size_t threads) {
  ExperimentOutput out;
  out.records = harness::ablation_over_seeds(cfg.scenario, cfg.seeds, cfg.params(), cfg.schedule(), cfg.steps,
                                             cfg.metrics, threads);
  out.csv = records_csv(out.records);

  std::map<priors::PriorKind, ArmSummary> arms;
  for (const auto& r : out.records) arms[r.prior.kind].add(r);

  ordered_json summary = summary_head("ablate", cfg);
  summary["alpha"] = cfg.alpha;
  std::vector<BarGroup> bars;
  for (const priors::PriorKind kind : priors::kAllPriors) {
    const ArmSummary& arm = arms[kind];
    ordered_json row = arm.to_json();
    row["prior"] = priors::label(kind);
    summary["priors"].push_back(row);
    BarGroup g{std::string(priors::label(kind)), {}};
    if (arm.completed() == 0) {
      g.values = {std::nullopt, std::nullopt};
    } else {
      g.values = {arm.mean(arm.r), arm.mean(arm.s)};
    }
    bars.push_back(std::move(g));
  }
  out.summary = summary.dump(2) + "\n";
  out.svg = bar_chart("Prior ablation, alpha = " + report::format_number(cfg.alpha, 6),
                      {"mean R_t", "mean S_t"}, bars);
  return out;
}

ExperimentOutput cmd_sweep(const ExperimentConfig& cfg, std::size_t threads) {
  if (cfg.alphas.empty()) throw ConfigError("\"alphas\" must hold at least one value for a sweep");
  ExperimentOutput out;
  out.records = harness::sweep_over_seeds(cfg.scenario, cfg.seeds, cfg.alphas, cfg.constants, cfg.prior,
                                          cfg.schedule(), cfg.steps, cfg.metrics, threads);
  out.csv = records_csv(out.records);

  std::vector<ArmSummary> arms(cfg.alphas.size());
  for (std::size_t i = 0; i < out.records.size(); ++i) arms[i % cfg.alphas.size()].add(out.records[i]);

  ordered_json summary = summary_head("sweep", cfg);
  summary["prior"] = priors::label(cfg.prior.kind);
  Series r{"R_t", "firebrick", {}};
  Series d{"D_t", "seagreen", {}};
  Series s{"S_t", "royalblue", {}};
  for (std::size_t a = 0; a < arms.size(); ++a) {
    ordered_json row = arms[a].to_json();
    row["alpha"] = cfg.alphas[a];
    summary["alphas"].push_back(row);
    r.y.push_back(arms[a].mean(arms[a].r));
    d.y.push_back(arms[a].mean(arms[a].d));
    s.y.push_back(arms[a].mean(arms[a].s));
  }
  out.summary = summary.dump(2) + "\n";
  out.svg = line_plot("Trade-off controller sweep (" + std::string(priors::label(cfg.prior.kind)) + " prior)",
                      "alpha", cfg.alphas, {r, d, s});
  return out;
}

metrics::MetricReport cmd_metrics(const io::Container& features, const ExperimentConfig& cfg) {
  return metrics::evaluate(io::to_features(features), cfg.metrics, cfg.cosine);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Physics-informed attention experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string format;
  std::string in_path;
  std::string mask_path;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)");
    sub->add_option("--seed", seed, "single seed replacing the config's seed list");
    sub->add_option("--format", format, "stdout format")->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* operate = app.add_subcommand("operate", "apply the physics operator to a feature file");
  common(operate);
  operate->add_option("--in", in_path, "feature container")->required();
  operate->add_option("--mask", mask_path, "mask container")->required();
  operate->add_option("--out", out_dir, "output directory")->required();

  CLI::App* ablate = app.add_subcommand("ablate", "compare the six priors");
  common(ablate);
  ablate->add_option("--out", out_dir, "output directory");

  CLI::App* sweep = app.add_subcommand("sweep", "sweep the trade-off controller alpha");
  common(sweep);
  sweep->add_option("--out", out_dir, "output directory");

  CLI::App* metrics_cmd = app.add_subcommand("metrics", "report R_t, D_t and S_t of a feature file");
  common(metrics_cmd);
  metrics_cmd->add_option("--in", in_path, "feature container")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (seed) cfg.seeds = {*seed};
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    const std::filesystem::path dir(cfg.output_dir);
    const std::size_t threads = default_thread_count();

    if (operate->parsed()) {
      const auto feature_bytes = io::read_file(in_path);
      const io::Format fmt = io::detect_format(feature_bytes);
      const OperateResult result = cmd_operate(io::read_container(in_path), io::read_container(mask_path), cfg);
      std::filesystem::create_directories(dir);
      const auto target = dir / (fmt == io::Format::json ? "phys.json" : "phys.bin");
      io::write_container(target, result.output, fmt);
      out << "energy_before " << report::format_number(result.energy_before) << "\n"
          << "energy_after " << report::format_number(result.energy_after) << "\n"
          << "wrote " << target.string() << "\n";
      return kExitOk;
    }

    if (ablate->parsed() || sweep->parsed()) {
      const bool is_ablate = ablate->parsed();
      const ExperimentOutput result = is_ablate ? cmd_ablate(cfg, threads) : cmd_sweep(cfg, threads);
      const std::string stem = is_ablate ? "ablation" : "sweep";
      std::filesystem::create_directories(dir);
      io::write_file_atomic(dir / (stem + ".csv"), result.csv);
      io::write_file_atomic(dir / (stem + ".svg"), result.svg);
      io::write_file_atomic(dir / (stem + ".json"), result.summary);
      out << (format == "json" ? result.summary : result.csv);
      return kExitOk;
    }

    const metrics::MetricReport report = cmd_metrics(io::read_container(in_path), cfg);
    if (format == "csv") {
      out << report::csv_line({"T", "R", "D", "R_hat", "D_hat", "S", "adjacent_cosine"})
          << report::csv_line({std::to_string(report.frames), report::format_number(report.r),
                               report::format_number(report.d), report::format_number(report.r_hat),
                               report::format_number(report.d_hat), report::format_number(report.s),
                               report.adjacent_cosine ? report::format_number(*report.adjacent_cosine) : ""});
    } else {
      out << report::metric_json(report);
    }
    return kExitOk;
  } catch (const DivergenceError& e) {
    err << "diverged: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ShapeError& e) {
    err << "shape error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace physattn::cli
