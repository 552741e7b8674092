#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "physattn/params.hpp"
#include "physattn/rng.hpp"
#include "physattn/types.hpp"

namespace physattn::priors {

/// Temporal update rules. The frame index is treated as the spatial axis of a
/// 1-D PDE and advanced in virtual time.
enum class PriorKind { identity, burgers, wave, conservation, elasticity, heat };

inline constexpr std::array<PriorKind, 6> kAllPriors = {
    PriorKind::identity, PriorKind::burgers,    PriorKind::wave,
    PriorKind::conservation, PriorKind::elasticity, PriorKind::heat,
};

/// Config/CSV label: ori, burgers, wave, conservation, elasticity, heat.
[[nodiscard]] std::string_view label(PriorKind kind) noexcept;
/// Inverse of label(); throws DomainError for unknown names.
[[nodiscard]] PriorKind parse_prior_kind(std::string_view name);

/// F(s) = speed * s.
struct LinearFlux {
  double speed = 1.0;
};
/// F(s) = s^2 / 2.
struct QuadraticFlux {};
using Flux = std::variant<LinearFlux, QuadraticFlux>;

struct PriorSpec {
  PriorKind kind = PriorKind::heat;
  /// Wave coefficient C; dtau * nu when unset.
  std::optional<double> wave_c;
  /// Elasticity coefficient C_e; dtau * nu when unset.
  std::optional<double> elastic_c;
  Flux flux = LinearFlux{};
  /// Substitute out-of-mask neighbours with the current frame and gate the
  /// deterministic increment by the current mask.
  bool insulated = true;

  /// Throws DomainError on negative or non-finite constants.
  void validate() const;
  /// Wave and Elasticity read two time levels.
  [[nodiscard]] bool two_level() const noexcept;
};

/// Per-frame, per-position noise intensity: sigma_s inside the mask,
/// sigma_b outside. Broadcast over channels.
class NoiseField {
 public:
  NoiseField(std::size_t frames, std::size_t height, std::size_t width, std::vector<double> sigma);

  [[nodiscard]] std::size_t frames() const noexcept { return frames_; }
  [[nodiscard]] std::size_t height() const noexcept { return height_; }
  [[nodiscard]] std::size_t width() const noexcept { return width_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return sigma_; }
  [[nodiscard]] double at(std::size_t t, std::size_t y, std::size_t x) const;

 private:
  std::size_t frames_;
  std::size_t height_;
  std::size_t width_;
  std::vector<double> sigma_;
};

/// s'_{t+dir} = M_{t+dir} * s_{t+dir} + (1 - M_{t+dir}) * s_t with periodic
/// frame indexing. `direction` must be +1 or -1.
[[nodiscard]] FeatureGrid effective_neighbor(const FeatureSequence& features, const MaskSequence& masks,
                                             std::size_t t, int direction);

/// s'_{t+1} - 2 s_t + s'_{t-1}, optionally multiplied by M_t.
[[nodiscard]] FeatureGrid insulated_laplacian(const FeatureSequence& features, const MaskSequence& masks,
                                              std::size_t t, bool gate_by_current = false);

[[nodiscard]] NoiseField build_noise_field(const MaskSequence& masks, const ControlParams& params);

struct StepResult {
  FeatureSequence state;     ///< level k+1
  FeatureSequence previous;  ///< level k, to thread into the next step
};

/// One virtual-time step k -> k+1 of the selected rule, followed by the
/// sqrt(2 dtau) * sigma_t * N(0,1) noise term when params.noise_enabled().
///
/// `prev_state` is the level k-1 state and is required by two-level rules.
/// `rng` is required when noise is enabled; element i (frame-major order) of
/// the step draws rng->normal(i). `iteration` only labels DivergenceError.
[[nodiscard]] StepResult step_prior(const FeatureSequence& state, const FeatureSequence* prev_state,
                                    const MaskSequence& masks, const PriorSpec& spec,
                                    const ControlParams& params, const OperatorSchedule& schedule,
                                    const RngHandle* rng, std::size_t iteration = 0);

/// n_iters steps of step_prior starting from zero velocity (prev := state).
/// Iteration k draws its noise from rng->fork(k).
[[nodiscard]] FeatureSequence run_physics_operator(const FeatureSequence& state, const MaskSequence& masks,
                                                   const PriorSpec& spec, const ControlParams& params,
                                                   const OperatorSchedule& schedule, const RngHandle* rng);

/// sum_t ||s_t - mean_t(s)||^2 over all positions and channels.
[[nodiscard]] double sequence_energy(const FeatureSequence& features);

/// sum_t s_t for every (position, channel); length frame_size().
[[nodiscard]] std::vector<double> framewise_sum(const FeatureSequence& features);

}  // namespace physattn::priors
