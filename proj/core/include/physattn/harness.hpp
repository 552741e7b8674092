#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "physattn/attention.hpp"
#include "physattn/masking.hpp"
#include "physattn/metrics.hpp"
#include "physattn/params.hpp"
#include "physattn/priors.hpp"
#include "physattn/rng.hpp"
#include "physattn/types.hpp"

namespace physattn::harness {

/// Axis-aligned block of positions [top, top+height) x [left, left+width).
struct Rect {
  std::size_t top = 0;
  std::size_t left = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  [[nodiscard]] bool contains(std::size_t y, std::size_t x) const noexcept {
    return y >= top && y < top + height && x >= left && x < left + width;
  }
};

/// Fully specified synthetic story: what the denoiser converges to, where the
/// subject is, and how noisy the saliency and denoiser are.
struct StoryScenario {
  std::size_t frames = 8;
  std::size_t height = 8;
  std::size_t width = 8;
  std::size_t channels = 8;

  std::vector<double> identity_vector;  ///< d values
  /// T*H*W*d prompt-driven content: the action inside the region, the scene
  /// outside it.
  std::vector<double> action_offsets;
  double drift_amplitude = 0.0;
  std::vector<Rect> subject_region;     ///< one per frame

  double saliency_peak = 1.0;
  double saliency_noise = 0.1;
  std::size_t saliency_height = 8;
  std::size_t saliency_width = 8;
  std::size_t window = masking::kDefaultWindow;

  double denoiser_rate = 0.2;
  double denoiser_noise = 0.0;
  /// Weight of the attention read-out against the physics-smoothed state
  /// inside the subject mask.
  double attention_mix = 0.5;

  std::uint64_t seed = 0;

  /// Throws DomainError on inconsistent shapes, an empty or out-of-bounds
  /// region, or negative amplitudes.
  void validate() const;
};

/// Compact description from which build_scenario derives a StoryScenario.
struct ScenarioParams {
  std::size_t frames = 8;
  std::size_t height = 8;
  std::size_t width = 8;
  std::size_t channels = 8;

  double identity_scale = 6.0;
  double background_scale = 6.0;
  double action_amplitude = 10.0;
  double drift_amplitude = 2.0;

  std::size_t region_top = 2;
  std::size_t region_left = 2;
  std::size_t region_height = 4;
  std::size_t region_width = 3;
  /// Columns the region slides right over the whole sequence.
  std::size_t region_motion = 1;

  double saliency_peak = 1.0;
  double saliency_noise = 0.1;
  std::size_t saliency_height = 0;  ///< 0: same as height
  std::size_t saliency_width = 0;   ///< 0: same as width
  std::size_t window = masking::kDefaultWindow;

  double denoiser_rate = 0.2;
  double denoiser_noise = 0.05;
  double attention_mix = 0.5;
};

/// Draws identity, scene and drift vectors from (seed, "scenario/...").
[[nodiscard]] StoryScenario build_scenario(const ScenarioParams& params, std::uint64_t seed);

struct SynthesizedStory {
  FeatureSequence features;  ///< initial states, also the denoiser target
  std::vector<masking::AttentionMapStack> windows;  ///< warm-start window per frame
  attention::IdBank bank;
  MaskSequence truth;  ///< subject_region rasterized at feature resolution
};

/// Frame t is identity_vector over the region plus action_offsets[t] plus a
/// per-frame drift vector of amplitude drift_amplitude inside the region.
[[nodiscard]] SynthesizedStory synthesize_scenario(const StoryScenario& scenario, std::size_t steps);

/// Saliency map `index` for frame t: saliency_peak inside the region plus
/// Gaussian noise, clipped at zero.
[[nodiscard]] masking::SaliencyGrid saliency_map(const StoryScenario& scenario, std::size_t t,
                                                 std::size_t index);

struct RunRecord {
  std::string scenario_id;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  priors::PriorSpec prior;
  std::vector<metrics::MetricReport> step_reports;
  metrics::MetricReport final_report;
  double wall_seconds = 0.0;

  bool diverged = false;
  std::string divergence;

  double mean_mask_iou = 0.0;
  /// Mean |x_l - x_{l-1}| over ground-truth background elements and steps.
  double background_change = 0.0;
  /// Mean squared deviation of the per-frame subject features from their mean.
  double subject_spread = 0.0;
  std::optional<FeatureSequence> final_state;
};

/// Optional per-step hook for tests and tracing: (step, masks, state after
/// the update).
using StepObserver = std::function<void(std::size_t, const MaskSequence&, const FeatureSequence&)>;

/// The sampling loop: window masks -> physics operator -> ID injection ->
/// disentangled attention -> denoiser contraction, L times. Deterministic in
/// scenario.seed. Throws DivergenceError on a non-finite state.
[[nodiscard]] RunRecord run_algorithm1(const StoryScenario& scenario, const ControlParams& params,
                                       const priors::PriorSpec& spec, const OperatorSchedule& schedule,
                                       std::size_t steps, const attention::ProjectionSet& proj,
                                       const metrics::MetricConfig& cfg = {},
                                       const StepObserver& observer = {});

/// Same loop with the unmodified self-attention block in place of the
/// intervention: no physics operator, no ID injection.
[[nodiscard]] RunRecord run_denoiser_only(const StoryScenario& scenario, std::size_t steps,
                                          const attention::ProjectionSet& proj,
                                          const metrics::MetricConfig& cfg = {});

/// Default projections for a seed: random_orthogonal(d, (seed, "projections")).
[[nodiscard]] attention::ProjectionSet default_projections(std::size_t channels, std::uint64_t seed);

/// One run per prior kind (insulated, default constants) with shared seeds.
/// A diverging prior yields a record with diverged = true.
[[nodiscard]] std::vector<RunRecord> ablation_priors(const StoryScenario& scenario, const ControlParams& params,
                                                     const OperatorSchedule& schedule, std::size_t steps,
                                                     const attention::ProjectionSet& proj,
                                                     const metrics::MetricConfig& cfg = {});

/// One run per alpha with shared seeds.
[[nodiscard]] std::vector<RunRecord> sweep_alpha(const StoryScenario& scenario, std::span<const double> alphas,
                                                 const BaseConstants& constants, const priors::PriorSpec& spec,
                                                 const OperatorSchedule& schedule, std::size_t steps,
                                                 const attention::ProjectionSet& proj,
                                                 const metrics::MetricConfig& cfg = {});

/// ablation_priors for every seed, run on up to `threads` workers. Output is
/// seed-major in the order of `seeds`, then in kAllPriors order.
[[nodiscard]] std::vector<RunRecord> ablation_over_seeds(const ScenarioParams& scenario,
                                                         std::span<const std::uint64_t> seeds,
                                                         const ControlParams& params,
                                                         const OperatorSchedule& schedule, std::size_t steps,
                                                         const metrics::MetricConfig& cfg, std::size_t threads);

/// sweep_alpha for every seed. Output is seed-major, then in `alphas` order.
[[nodiscard]] std::vector<RunRecord> sweep_over_seeds(const ScenarioParams& scenario,
                                                      std::span<const std::uint64_t> seeds,
                                                      std::span<const double> alphas,
                                                      const BaseConstants& constants,
                                                      const priors::PriorSpec& spec,
                                                      const OperatorSchedule& schedule, std::size_t steps,
                                                      const metrics::MetricConfig& cfg, std::size_t threads);

}  // namespace physattn::harness
