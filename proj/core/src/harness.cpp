#include "physattn/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "physattn/errors.hpp"
#include "physattn/parallel.hpp"

namespace physattn::harness {

namespace {

void require_nonnegative(double value, const char* name) {
  if (!(std::isfinite(value) && value >= 0.0)) {
    throw DomainError(std::string(name) + " must be finite and nonnegative");
  }
}

MaskSequence rasterize(const StoryScenario& s) {
  std::vector<std::uint8_t> bits(s.frames * s.height * s.width, 0);
  for (std::size_t t = 0; t < s.frames; ++t) {
    for (std::size_t y = 0; y < s.height; ++y) {
      for (std::size_t x = 0; x < s.width; ++x) {
        bits[(t * s.height + y) * s.width + x] = s.subject_region[t].contains(y, x) ? 1 : 0;
      }
    }
  }
  return MaskSequence(s.frames, s.height, s.width, std::move(bits));
}

std::vector<double> gaussian_vector(const RngHandle& rng, std::size_t n, double scale) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = scale * rng.normal(i);
  return v;
}

// Per-frame mean of the state over the masked positions; ground truth stands
// in for frames whose mask is empty.
FeatureSequence subject_features(const FeatureSequence& x, const MaskSequence& masks, const MaskSequence& truth) {
  const std::size_t d = x.channels();
  const std::size_t positions = masks.positions();
  std::vector<double> out(x.frames() * d, 0.0);
  for (std::size_t t = 0; t < x.frames(); ++t) {
    const bool empty = std::none_of(masks.frame(t).begin(), masks.frame(t).end(), [](auto b) { return b != 0; });
    const auto gate = empty ? truth.frame(t) : masks.frame(t);
    const auto frame = x.frame(t);
    std::size_t count = 0;
    for (std::size_t p = 0; p < positions; ++p) {
      if (!gate[p]) continue;
      ++count;
      for (std::size_t c = 0; c < d; ++c) out[t * d + c] += frame[p * d + c];
    }
    for (std::size_t c = 0; c < d; ++c) out[t * d + c] /= static_cast<double>(count);
  }
  return FeatureSequence(x.frames(), {1, 1, d}, std::move(out));
}

double spread(const FeatureSequence& f) {
  const std::size_t d = f.frame_size();
  std::vector<double> mean(d, 0.0);
  for (std::size_t t = 0; t < f.frames(); ++t) {
    for (std::size_t c = 0; c < d; ++c) mean[c] += f.frame(t)[c];
  }
  for (double& m : mean) m /= static_cast<double>(f.frames());
  double total = 0.0;
  for (std::size_t t = 0; t < f.frames(); ++t) {
    for (std::size_t c = 0; c < d; ++c) {
      const double dev = f.frame(t)[c] - mean[c];
      total += dev * dev;
    }
  }
  return total / static_cast<double>(f.frames());
}

void require_orthogonal(const attention::Matrix& m) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < n; ++k) dot += m(i, k) * m(j, k);
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-9) {
        throw DomainError("harness value projection must be orthogonal");
      }
    }
  }
}

metrics::MetricReport evaluate_subject(const FeatureSequence& f, const metrics::MetricConfig& cfg) {
  metrics::MetricReport report = metrics::evaluate(f, cfg, false);
  try {
    report.adjacent_cosine = metrics::adjacent_similarity(f);
  } catch (const DomainError&) {
    report.adjacent_cosine.reset();
  }
  return report;
}

RunRecord run_loop(const StoryScenario& scenario, const ControlParams* params, const priors::PriorSpec* spec,
                   const OperatorSchedule* schedule, std::size_t steps, const attention::ProjectionSet& proj,
                   const metrics::MetricConfig& cfg, const StepObserver& observer) {
  const auto started = std::chrono::steady_clock::now();
  scenario.validate();
  cfg.validate();
  if (steps < 1) throw DomainError("the sampling loop needs L >= 1");
  if (proj.channels() != scenario.channels) {
    throw ShapeError(ShapeFault::channels, "projection size does not match scenario depth");
  }
  require_orthogonal(proj.w_v());
  const attention::Matrix readout = proj.w_v().transposed();
  const bool intervene = params != nullptr;

  RunRecord record;
  record.scenario_id = "seed-" + std::to_string(scenario.seed);
  record.seed = scenario.seed;
  record.alpha = intervene ? params->alpha() : 0.0;
  if (spec != nullptr) record.prior = *spec;

  SynthesizedStory story = synthesize_scenario(scenario, steps);
  const FeatureSequence& target = story.features;
  FeatureSequence x = target;

  const std::size_t d = scenario.channels;
  const double beta = scenario.attention_mix;
  const double eta = scenario.denoiser_rate;
  const RngHandle run_rng(scenario.seed, "run");
  const auto truth_bits = story.truth.bits();

  double iou_total = 0.0;
  double background_total = 0.0;
  std::size_t background_count = 0;

  for (std::size_t l = 0; l < steps; ++l) {
    if (l > 0) {
      for (std::size_t t = 0; t < scenario.frames; ++t) {
        auto& maps = story.windows[t].maps;
        maps.push_back(saliency_map(scenario, t, scenario.window - 1 + l));
        if (maps.size() > scenario.window) maps.erase(maps.begin());
      }
    }
    std::vector<MaskGrid> grids;
    grids.reserve(scenario.frames);
    double iou = 0.0;
    for (std::size_t t = 0; t < scenario.frames; ++t) {
      grids.push_back(masking::subject_mask(story.windows[t], scenario.height, scenario.width));
      iou += masking::intersection_over_union(grids.back(), story.truth.frame_grid(t));
    }
    iou_total += iou / static_cast<double>(scenario.frames);
    const MaskSequence masks = MaskSequence::from_grids(grids);

    std::optional<FeatureSequence> smoothed;
    std::optional<FeatureSequence> enhanced;
    if (intervene) {
      const RngHandle physics_rng = run_rng.fork("physics").fork(l);
      smoothed = priors::run_physics_operator(x, masks, *spec, *params, *schedule,
                                              params->noise_enabled() ? &physics_rng : nullptr);
      enhanced = attention::inject_identity(x, story.bank.entry(l), masks, *params);
    }
    const FeatureSequence& q_source = smoothed ? *smoothed : x;
    const FeatureSequence& kv_source = enhanced ? *enhanced : x;
    const FeatureSequence read =
        attention::project_tokens(attention::disentangled_attention(q_source, kv_source, proj), readout);

    const RngHandle denoise_rng = run_rng.fork("denoiser").fork(l);
    const auto q = q_source.values();
    const auto r = read.values();
    const auto goal = target.values();
    const auto prev = x.values();
    const auto bits = masks.bits();
    std::vector<double> next(q.size());
    for (std::size_t i = 0; i < next.size(); ++i) {
      const bool inside = bits[i / d] != 0;
      const double h = inside ? (1.0 - beta) * q[i] + beta * r[i] : q[i];
      double v = h + eta * (goal[i] - h);
      if (scenario.denoiser_noise > 0.0) v += scenario.denoiser_noise * denoise_rng.normal(i);
      if (!std::isfinite(v)) throw DivergenceError("denoiser", l);
      next[i] = v;
      if (!truth_bits[i / d]) {
        background_total += std::abs(v - prev[i]);
        ++background_count;
      }
    }
    x = FeatureSequence(scenario.frames, {scenario.height, scenario.width, d}, std::move(next));

    record.step_reports.push_back(evaluate_subject(subject_features(x, masks, story.truth), cfg));
    if (l + 1 == steps) record.subject_spread = spread(subject_features(x, masks, story.truth));
    if (observer) observer(l, masks, x);
  }

  record.final_report = record.step_reports.back();
  record.mean_mask_iou = iou_total / static_cast<double>(steps);
  record.background_change =
      background_count == 0 ? 0.0 : background_total / static_cast<double>(background_count);
  record.final_state = std::move(x);
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return record;
}

RunRecord diverged_record(const StoryScenario& scenario, double alpha, const priors::PriorSpec& spec,
                          const DivergenceError& e) {
  RunRecord record;
  record.scenario_id = "seed-" + std::to_string(scenario.seed);
  record.seed = scenario.seed;
  record.alpha = alpha;
  record.prior = spec;
  record.diverged = true;
  record.divergence = e.what();
  return record;
}

}  // namespace

void StoryScenario::validate() const {
  if (frames < 3) throw DomainError("scenario needs T >= 3 for the sequence metrics");
  if (height == 0 || width == 0 || channels == 0) throw DomainError("scenario extents must be at least 1");
  if (identity_vector.size() != channels) throw DomainError("identity vector length must equal d");
  if (action_offsets.size() != frames * height * width * channels) {
    throw DomainError("action offsets must hold T*H*W*d values");
  }
  if (subject_region.size() != frames) throw DomainError("subject region needs one rectangle per frame");
  for (const Rect& r : subject_region) {
    if (r.height == 0 || r.width == 0) throw DomainError("subject region is empty");
    if (r.top + r.height > height || r.left + r.width > width) {
      throw DomainError("subject region extends past the frame");
    }
  }
  require_nonnegative(drift_amplitude, "drift_amplitude");
  require_nonnegative(saliency_peak, "saliency_peak");
  require_nonnegative(saliency_noise, "saliency_noise");
  require_nonnegative(denoiser_noise, "denoiser_noise");
  if (saliency_height == 0 || saliency_width == 0) throw DomainError("saliency extents must be at least 1");
  if (window == 0) throw DomainError("attention window must hold at least one map");
  if (!(denoiser_rate >= 0.0 && denoiser_rate <= 1.0)) throw DomainError("denoiser_rate must lie in [0,1]");
  if (!(attention_mix >= 0.0 && attention_mix <= 1.0)) throw DomainError("attention_mix must lie in [0,1]");
  for (const double v : identity_vector) {
    if (!std::isfinite(v)) throw DomainError("identity vector must be finite");
  }
  for (const double v : action_offsets) {
    if (!std::isfinite(v)) throw DomainError("action offsets must be finite");
  }
}

StoryScenario build_scenario(const ScenarioParams& p, std::uint64_t seed) {
  StoryScenario s;
  s.frames = p.frames;
  s.height = p.height;
  s.width = p.width;
  s.channels = p.channels;
  s.drift_amplitude = p.drift_amplitude;
  s.saliency_peak = p.saliency_peak;
  s.saliency_noise = p.saliency_noise;
  s.saliency_height = p.saliency_height == 0 ? p.height : p.saliency_height;
  s.saliency_width = p.saliency_width == 0 ? p.width : p.saliency_width;
  s.window = p.window;
  s.denoiser_rate = p.denoiser_rate;
  s.denoiser_noise = p.denoiser_noise;
  s.attention_mix = p.attention_mix;
  s.seed = seed;
  if (p.frames == 0 || p.channels == 0) throw DomainError("scenario extents must be at least 1");

  const RngHandle rng(seed, "scenario");
  s.identity_vector = gaussian_vector(rng.fork("identity"), p.channels, p.identity_scale);
  const auto background = gaussian_vector(rng.fork("background"), p.channels, p.background_scale);
  const auto action_u = gaussian_vector(rng.fork("action-u"), p.channels, 1.0);
  const auto action_w = gaussian_vector(rng.fork("action-w"), p.channels, 1.0);

  s.subject_region.reserve(p.frames);
  for (std::size_t t = 0; t < p.frames; ++t) {
    s.subject_region.push_back(
        Rect{p.region_top, p.region_left + t * p.region_motion / p.frames, p.region_height, p.region_width});
  }

  const std::size_t d = p.channels;
  s.action_offsets.assign(p.frames * p.height * p.width * d, 0.0);
  for (std::size_t t = 0; t < p.frames; ++t) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(p.frames);
    for (std::size_t y = 0; y < p.height; ++y) {
      for (std::size_t x = 0; x < p.width; ++x) {
        double* cell = s.action_offsets.data() + ((t * p.height + y) * p.width + x) * d;
        const bool inside = s.subject_region[t].contains(y, x);
        for (std::size_t c = 0; c < d; ++c) {
          cell[c] = inside ? p.action_amplitude * (std::sin(phase) * action_u[c] + std::cos(phase) * action_w[c])
                           : background[c];
        }
      }
    }
  }
  s.validate();
  return s;
}

masking::SaliencyGrid saliency_map(const StoryScenario& s, std::size_t t, std::size_t index) {
  const RngHandle rng = RngHandle(s.seed, "saliency").fork(index).fork(t);
  std::vector<double> values(s.saliency_height * s.saliency_width);
  for (std::size_t ys = 0; ys < s.saliency_height; ++ys) {
    for (std::size_t xs = 0; xs < s.saliency_width; ++xs) {
      const std::size_t y = ys * s.height / s.saliency_height;
      const std::size_t x = xs * s.width / s.saliency_width;
      const std::size_t i = ys * s.saliency_width + xs;
      const double signal = s.subject_region[t].contains(y, x) ? s.saliency_peak : 0.0;
      values[i] = std::max(0.0, signal + s.saliency_noise * rng.normal(i));
    }
  }
  return masking::SaliencyGrid(s.saliency_height, s.saliency_width, std::move(values));
}

SynthesizedStory synthesize_scenario(const StoryScenario& s, std::size_t steps) {
  s.validate();
  if (steps < 1) throw DomainError("the ID bank needs at least one step");
  const std::size_t d = s.channels;
  const RngHandle drift_rng = RngHandle(s.seed, "scenario").fork("drift");

  std::vector<double> values(s.action_offsets);
  for (std::size_t t = 0; t < s.frames; ++t) {
    for (std::size_t y = 0; y < s.height; ++y) {
      for (std::size_t x = 0; x < s.width; ++x) {
        if (!s.subject_region[t].contains(y, x)) continue;
        double* cell = values.data() + ((t * s.height + y) * s.width + x) * d;
        for (std::size_t c = 0; c < d; ++c) {
          cell[c] += s.identity_vector[c] + s.drift_amplitude * drift_rng.normal(t * d + c);
        }
      }
    }
  }

  std::vector<masking::AttentionMapStack> windows(s.frames);
  for (std::size_t t = 0; t < s.frames; ++t) {
    for (std::size_t j = 0; j < s.window; ++j) windows[t].maps.push_back(saliency_map(s, t, j));
  }

  std::vector<FeatureGrid> bank(steps, FeatureGrid::broadcast(s.height, s.width, s.identity_vector));

  return SynthesizedStory{FeatureSequence(s.frames, {s.height, s.width, d}, std::move(values)),
                          std::move(windows), attention::IdBank(std::move(bank)), rasterize(s)};
}

RunRecord run_algorithm1(const StoryScenario& scenario, const ControlParams& params, const priors::PriorSpec& spec,
                         const OperatorSchedule& schedule, std::size_t steps, const attention::ProjectionSet& proj,
                         const metrics::MetricConfig& cfg, const StepObserver& observer) {
  return run_loop(scenario, &params, &spec, &schedule, steps, proj, cfg, observer);
}

RunRecord run_denoiser_only(const StoryScenario& scenario, std::size_t steps, const attention::ProjectionSet& proj,
                            const metrics::MetricConfig& cfg) {
  return run_loop(scenario, nullptr, nullptr, nullptr, steps, proj, cfg, {});
}

attention::ProjectionSet default_projections(std::size_t channels, std::uint64_t seed) {
  return attention::ProjectionSet::random_orthogonal(channels, RngHandle(seed, "projections"));
}

std::vector<RunRecord> ablation_priors(const StoryScenario& scenario, const ControlParams& params,
                                       const OperatorSchedule& schedule, std::size_t steps,
                                       const attention::ProjectionSet& proj, const metrics::MetricConfig& cfg) {
  std::vector<RunRecord> out;
  out.reserve(priors::kAllPriors.size());
  for (const priors::PriorKind kind : priors::kAllPriors) {
    priors::PriorSpec spec;
    spec.kind = kind;
    try {
      out.push_back(run_algorithm1(scenario, params, spec, schedule, steps, proj, cfg));
    } catch (const DivergenceError& e) {
      out.push_back(diverged_record(scenario, params.alpha(), spec, e));
    }
  }
  return out;
}

std::vector<RunRecord> sweep_alpha(const StoryScenario& scenario, std::span<const double> alphas,
                                   const BaseConstants& constants, const priors::PriorSpec& spec,
                                   const OperatorSchedule& schedule, std::size_t steps,
                                   const attention::ProjectionSet& proj, const metrics::MetricConfig& cfg) {
  std::vector<RunRecord> out;
  out.reserve(alphas.size());
  for (const double alpha : alphas) {
    const ControlParams params = derive_params(alpha, constants);
    try {
      out.push_back(run_algorithm1(scenario, params, spec, schedule, steps, proj, cfg));
    } catch (const DivergenceError& e) {
      out.push_back(diverged_record(scenario, alpha, spec, e));
    }
  }
  return out;
}

std::vector<RunRecord> ablation_over_seeds(const ScenarioParams& scenario, std::span<const std::uint64_t> seeds,
                                           const ControlParams& params, const OperatorSchedule& schedule,
                                           std::size_t steps, const metrics::MetricConfig& cfg,
                                           std::size_t threads) {
  const std::size_t arms = priors::kAllPriors.size();
  std::vector<std::optional<RunRecord>> slots(seeds.size() * arms);
  parallel_for(slots.size(), threads, [&](std::size_t job) {
    const std::uint64_t seed = seeds[job / arms];
    const StoryScenario story = build_scenario(scenario, seed);
    priors::PriorSpec spec;
    spec.kind = priors::kAllPriors[job % arms];
    try {
      slots[job] = run_algorithm1(story, params, spec, schedule, steps,
                                  default_projections(scenario.channels, seed), cfg);
    } catch (const DivergenceError& e) {
      slots[job] = diverged_record(story, params.alpha(), spec, e);
    }
  });
  std::vector<RunRecord> out;
  out.reserve(slots.size());
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

std::vector<RunRecord> sweep_over_seeds(const ScenarioParams& scenario, std::span<const std::uint64_t> seeds,
                                        std::span<const double> alphas, const BaseConstants& constants,
                                        const priors::PriorSpec& spec, const OperatorSchedule& schedule,
                                        std::size_t steps, const metrics::MetricConfig& cfg, std::size_t threads) {
  const std::size_t arms = alphas.size();
  std::vector<std::optional<RunRecord>> slots(seeds.size() * arms);
  parallel_for(slots.size(), threads, [&](std::size_t job) {
    const std::uint64_t seed = seeds[job / arms];
    const double alpha = alphas[job % arms];
    const StoryScenario story = build_scenario(scenario, seed);
    const ControlParams params = derive_params(alpha, constants);
    try {
      slots[job] = run_algorithm1(story, params, spec, schedule, steps,
                                  default_projections(scenario.channels, seed), cfg);
    } catch (const DivergenceError& e) {
      slots[job] = diverged_record(story, alpha, spec, e);
    }
  });
  std::vector<RunRecord> out;
  out.reserve(slots.size());
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

}  // namespace physattn::harness
