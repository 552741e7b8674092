#include "config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "physattn/container_io.hpp"

namespace physattn::cli {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where() + " must be a JSON object");
  }

  /// Call after every field has been read.
  void reject_unknown() const {
    for (const auto& [key, _] : node_.items()) {
      if (!seen_.contains(key)) throw ConfigError("unknown key \"" + key + "\" in " + where());
    }
  }

  const json* find(const std::string& key) {
    seen_[key] = true;
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(field(key) + " must be a number");
      out = v->get<double>();
    }
  }

  void count(const std::string& key, std::size_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(field(key) + " must be a nonnegative integer");
      out = v->get<std::size_t>();
    }
  }

  void flag(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key) + " must be true or false");
      out = v->get<bool>();
    }
  }

  void text(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key) + " must be a string");
      out = v->get<std::string>();
    }
  }

  void optional_number(const std::string& key, std::optional<double>& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        throw ConfigError(field(key) + " must be a number or null");
      }
    }
  }

  [[nodiscard]] std::string field(const std::string& key) const {
    return path_.empty() ? "\"" + key + "\"" : "\"" + path_ + "." + key + "\"";
  }

 private:
  [[nodiscard]] std::string where() const { return path_.empty() ? "the config" : "\"" + path_ + "\""; }

  const json& node_;
  std::string path_;
  std::map<std::string, bool> seen_;
};

void read_scenario(const json& node, harness::ScenarioParams& s) {
  Reader r(node, "scenario");
  r.count("frames", s.frames);
  r.count("height", s.height);
  r.count("width", s.width);
  r.count("channels", s.channels);
  r.number("identity_scale", s.identity_scale);
  r.number("background_scale", s.background_scale);
  r.number("action_amplitude", s.action_amplitude);
  r.number("drift_amplitude", s.drift_amplitude);
  r.count("region_top", s.region_top);
  r.count("region_left", s.region_left);
  r.count("region_height", s.region_height);
  r.count("region_width", s.region_width);
  r.count("region_motion", s.region_motion);
  r.number("saliency_peak", s.saliency_peak);
  r.number("saliency_noise", s.saliency_noise);
  r.count("saliency_height", s.saliency_height);
  r.count("saliency_width", s.saliency_width);
  r.count("window", s.window);
  r.number("denoiser_rate", s.denoiser_rate);
  r.number("denoiser_noise", s.denoiser_noise);
  r.number("attention_mix", s.attention_mix);
  r.reject_unknown();
}

void read_prior(const json& node, priors::PriorSpec& p) {
  Reader r(node, "prior");
  std::string kind(priors::label(p.kind));
  r.text("kind", kind);
  try {
    p.kind = priors::parse_prior_kind(kind);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("\"prior.kind\": ") + e.what());
  }
  r.optional_number("wave_c", p.wave_c);
  r.optional_number("elastic_c", p.elastic_c);
  std::string flux = std::holds_alternative<priors::QuadraticFlux>(p.flux) ? "quadratic" : "linear";
  double speed = 1.0;
  if (const auto* linear = std::get_if<priors::LinearFlux>(&p.flux)) speed = linear->speed;
  r.text("flux", flux);
  r.number("speed", speed);
  if (flux == "linear") {
    p.flux = priors::LinearFlux{speed};
  } else if (flux == "quadratic") {
    p.flux = priors::QuadraticFlux{};
  } else {
    throw ConfigError("\"prior.flux\" must be \"linear\" or \"quadratic\"");
  }
  r.flag("insulated", p.insulated);
  r.reject_unknown();
}

}  // namespace

std::vector<std::uint64_t> ExperimentConfig::default_seeds() {
  std::vector<std::uint64_t> seeds(20);
  std::iota(seeds.begin(), seeds.end(), std::uint64_t{1});
  return seeds;
}

void ExperimentConfig::validate() const {
  try {
    (void)params();
    (void)schedule();
    prior.validate();
    metrics.validate();
    (void)harness::build_scenario(scenario, 0);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (steps < 1) throw ConfigError("\"steps\" must be at least 1");
  for (const double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("\"alphas\" entries must lie in [0,1]");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t offset = e.byte == 0 ? 0 : e.byte - 1;
    const auto [line, column] = io::line_column(text, offset);
    throw ParseError("malformed JSON config", line, column, offset);
  }

  ExperimentConfig cfg;
  Reader r(doc, "");
  if (const json* v = r.find("scenario")) read_scenario(*v, cfg.scenario);
  if (const json* v = r.find("constants")) {
    Reader c(*v, "constants");
    c.number("c_heat", cfg.constants.c_heat);
    c.number("c_id", cfg.constants.c_id);
    c.number("c_s", cfg.constants.c_s);
    c.number("c_b", cfg.constants.c_b);
    c.reject_unknown();
  }
  r.number("alpha", cfg.alpha);
  if (const json* v = r.find("prior")) read_prior(*v, cfg.prior);
  if (const json* v = r.find("schedule")) {
    Reader s(*v, "schedule");
    s.count("n_iters", cfg.n_iters);
    s.number("dtau", cfg.dtau);
    s.reject_unknown();
  }
  if (const json* v = r.find("metrics")) {
    Reader m(*v, "metrics");
    m.number("gamma_r", cfg.metrics.gamma_r);
    m.number("gamma_d", cfg.metrics.gamma_d);
    m.number("p", cfg.metrics.p);
    m.flag("cosine", cfg.cosine);
    m.reject_unknown();
  }
  r.count("steps", cfg.steps);
  if (const json* v = r.find("alphas")) {
    if (!v->is_array()) throw ConfigError("\"alphas\" must be an array of numbers");
    cfg.alphas.clear();
    for (const auto& a : *v) {
      if (!a.is_number()) throw ConfigError("\"alphas\" must be an array of numbers");
      cfg.alphas.push_back(a.get<double>());
    }
  }
  if (const json* v = r.find("seeds")) {
    if (!v->is_array()) throw ConfigError("\"seeds\" must be an array of nonnegative integers");
    cfg.seeds.clear();
    for (const auto& s : *v) {
      if (!s.is_number_unsigned()) throw ConfigError("\"seeds\" must be an array of nonnegative integers");
      cfg.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  r.text("output_dir", cfg.output_dir);
  r.reject_unknown();

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace physattn::cli
