#include "physattn/priors.hpp"

#include <cmath>
#include <string>

#include "physattn/errors.hpp"

namespace physattn::priors {

namespace {

void require_coefficient(const std::optional<double>& c, const char* name) {
  if (c && !(std::isfinite(*c) && *c >= 0.0)) {
    throw DomainError(std::string(name) + " must be finite and nonnegative, got " + std::to_string(*c));
  }
}

double flux_value(const Flux& flux, double s) {
  if (const auto* linear = std::get_if<LinearFlux>(&flux)) return linear->speed * s;
  return 0.5 * s * s;
}

}  // namespace

std::string_view label(PriorKind kind) noexcept {
  switch (kind) {
    case PriorKind::identity:
      return "ori";
    case PriorKind::burgers:
      return "burgers";
    case PriorKind::wave:
      return "wave";
    case PriorKind::conservation:
      return "conservation";
    case PriorKind::elasticity:
      return "elasticity";
    case PriorKind::heat:
      return "heat";
  }
  return "unknown";
}

PriorKind parse_prior_kind(std::string_view name) {
  for (const PriorKind kind : kAllPriors) {
    if (label(kind) == name) return kind;
  }
  throw DomainError("unknown prior \"" + std::string(name) +
                    "\" (expected ori, burgers, wave, conservation, elasticity or heat)");
}

void PriorSpec::validate() const {
  require_coefficient(wave_c, "wave_c");
  require_coefficient(elastic_c, "elastic_c");
  if (const auto* linear = std::get_if<LinearFlux>(&flux); linear && !std::isfinite(linear->speed)) {
    throw DomainError("flux speed must be finite");
  }
}

bool PriorSpec::two_level() const noexcept {
  return kind == PriorKind::wave || kind == PriorKind::elasticity;
}

NoiseField::NoiseField(std::size_t frames, std::size_t height, std::size_t width, std::vector<double> sigma)
    : frames_(frames), height_(height), width_(width), sigma_(std::move(sigma)) {
  if (sigma_.size() != frames_ * height_ * width_) {
    throw ShapeError(ShapeFault::element_count, "noise field size does not match T*H*W");
  }
  for (const double s : sigma_) {
    if (!(std::isfinite(s) && s >= 0.0)) throw DomainError("noise intensities must be finite and >= 0");
  }
}

double NoiseField::at(std::size_t t, std::size_t y, std::size_t x) const {
  return sigma_.at((t * height_ + y) * width_ + x);
}

FeatureGrid effective_neighbor(const FeatureSequence& features, const MaskSequence& masks, std::size_t t,
                               int direction) {
  validate_pair(features, masks);
  if (direction != 1 && direction != -1) throw DomainError("neighbor direction must be +1 or -1");
  if (t >= features.frames()) throw DomainError("frame index " + std::to_string(t) + " out of range");

  const std::size_t nb = wrap_frame(t, direction, features.frames());
  const auto here = features.frame(t);
  const auto there = features.frame(nb);
  const auto gate = masks.frame(nb);
  const std::size_t depth = features.channels();

  std::vector<double> out(here.size());
  for (std::size_t p = 0; p < gate.size(); ++p) {
    const auto& src = gate[p] ? there : here;
    for (std::size_t c = 0; c < depth; ++c) out[p * depth + c] = src[p * depth + c];
  }
  return FeatureGrid(features.grid_shape(), std::move(out));
}

FeatureGrid insulated_laplacian(const FeatureSequence& features, const MaskSequence& masks, std::size_t t,
                                bool gate_by_current) {
  const FeatureGrid next = effective_neighbor(features, masks, t, +1);
  const FeatureGrid prev = effective_neighbor(features, masks, t, -1);
  const auto here = features.frame(t);
  const auto current_mask = masks.frame(t);
  const std::size_t depth = features.channels();

  std::vector<double> out(here.size());
  for (std::size_t i = 0; i < here.size(); ++i) {
    const double lap = next.values()[i] - 2.0 * here[i] + prev.values()[i];
    out[i] = (gate_by_current && !current_mask[i / depth]) ? 0.0 : lap;
  }
  return FeatureGrid(features.grid_shape(), std::move(out));
}

NoiseField build_noise_field(const MaskSequence& masks, const ControlParams& params) {
  std::vector<double> sigma(masks.bits().size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    sigma[i] = masks.bits()[i] ? params.sigma_s() : params.sigma_b();
  }
  return NoiseField(masks.frames(), masks.height(), masks.width(), std::move(sigma));
}

StepResult step_prior(const FeatureSequence& state, const FeatureSequence* prev_state, const MaskSequence& masks,
                      const PriorSpec& spec, const ControlParams& params, const OperatorSchedule& schedule,
                      const RngHandle* rng, std::size_t iteration) {
  validate_pair(state, masks);
  spec.validate();
  if (spec.two_level()) {
    if (prev_state == nullptr) {
      throw DomainError(std::string(label(spec.kind)) + " prior needs the previous time level");
    }
    if (prev_state->frames() != state.frames() || prev_state->grid_shape() != state.grid_shape()) {
      throw ShapeError(ShapeFault::element_count, "previous time level differs in shape from the state");
    }
  }
  const bool noisy = params.noise_enabled();
  if (noisy && rng == nullptr) throw DomainError("noise is enabled but no random stream was supplied");

  const double dtau = schedule.dtau();
  const double diffusion = dtau * params.nu();
  const double wave_c = spec.wave_c.value_or(diffusion);
  const double elastic_c = spec.elastic_c.value_or(diffusion);

  const std::size_t frames = state.frames();
  const std::size_t positions = masks.positions();
  const std::size_t depth = state.channels();
  const auto cur = state.values();
  const auto bits = masks.bits();

  std::vector<double> next(cur.size());
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t tn = wrap_frame(t, +1, frames);
    const std::size_t tp = wrap_frame(t, -1, frames);
    for (std::size_t p = 0; p < positions; ++p) {
      const bool m_here = !spec.insulated || bits[t * positions + p];
      const bool m_next = !spec.insulated || bits[tn * positions + p];
      const bool m_prev = !spec.insulated || bits[tp * positions + p];
      for (std::size_t c = 0; c < depth; ++c) {
        const std::size_t i = (t * positions + p) * depth + c;
        const double s = cur[i];
        if (!m_here) {
          next[i] = s;
          continue;
        }
        const double sn = m_next ? cur[(tn * positions + p) * depth + c] : s;
        const double sp = m_prev ? cur[(tp * positions + p) * depth + c] : s;
        switch (spec.kind) {
          case PriorKind::identity:
            next[i] = s;
            break;
          case PriorKind::burgers:
            next[i] = s - dtau * s * (sn - sp) / 2.0;
            break;
          case PriorKind::conservation:
            next[i] = s - dtau * (flux_value(spec.flux, sn) - flux_value(spec.flux, sp)) / 2.0;
            break;
          case PriorKind::wave:
            next[i] = 2.0 * s - prev_state->values()[i] + wave_c * (sn - 2.0 * s + sp);
            break;
          case PriorKind::elasticity:
            next[i] = 2.0 * s - prev_state->values()[i] + elastic_c * (sn - 2.0 * s + sp);
            break;
          case PriorKind::heat:
            next[i] = s + diffusion * (sn - 2.0 * s + sp);
            break;
        }
      }
    }
  }

  if (noisy) {
    const NoiseField sigma = build_noise_field(masks, params);
    const double amplitude = std::sqrt(2.0 * dtau);
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] += amplitude * sigma.values()[i / depth] * rng->normal(i);
    }
  }

  for (const double v : next) {
    if (!std::isfinite(v)) throw DivergenceError(std::string(label(spec.kind)), iteration);
  }
  return StepResult{FeatureSequence(frames, state.grid_shape(), std::move(next)), state};
}

FeatureSequence run_physics_operator(const FeatureSequence& state, const MaskSequence& masks,
                                     const PriorSpec& spec, const ControlParams& params,
                                     const OperatorSchedule& schedule, const RngHandle* rng) {
  FeatureSequence current = state;
  FeatureSequence previous = state;
  for (std::size_t k = 0; k < schedule.n_iters(); ++k) {
    std::optional<RngHandle> iteration_rng;
    if (rng != nullptr) iteration_rng.emplace(rng->fork(k));
    auto [advanced, level_k] = step_prior(current, &previous, masks, spec, params, schedule,
                                          iteration_rng ? &*iteration_rng : nullptr, k);
    previous = std::move(level_k);
    current = std::move(advanced);
  }
  return current;
}

double sequence_energy(const FeatureSequence& features) {
  const std::size_t n = features.frame_size();
  const std::size_t frames = features.frames();
  const auto v = features.values();
  std::vector<double> mean(n, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t i = 0; i < n; ++i) mean[i] += v[t * n + i];
  }
  for (double& m : mean) m /= static_cast<double>(frames);
  double energy = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = v[t * n + i] - mean[i];
      energy += d * d;
    }
  }
  return energy;
}

std::vector<double> framewise_sum(const FeatureSequence& features) {
  const std::size_t n = features.frame_size();
  std::vector<double> sum(n, 0.0);
  const auto v = features.values();
  for (std::size_t t = 0; t < features.frames(); ++t) {
    for (std::size_t i = 0; i < n; ++i) sum[i] += v[t * n + i];
  }
  return sum;
}

}  // namespace physattn::priors
