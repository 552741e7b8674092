#pragma once

#include <cstddef>

namespace physattn {

/// Base coefficients scaled by the trade-off controller alpha.
struct BaseConstants {
  double c_heat = 2.0;
  double c_id = 1.0;
  double c_s = 0.1;
  double c_b = 0.1;
};

/// The trade-off controller alpha and the four coefficients derived from it.
/// Derived values are only ever computed by derive_params.
class ControlParams {
 public:
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] const BaseConstants& constants() const noexcept { return constants_; }

  /// Diffusion strength, c_heat * alpha.
  [[nodiscard]] double nu() const noexcept { return nu_; }
  /// ID-bank blend weight, min(c_id * alpha, 1).
  [[nodiscard]] double lambda_id() const noexcept { return lambda_id_; }
  /// Subject noise intensity, c_s * (1 - alpha).
  [[nodiscard]] double sigma_s() const noexcept { return sigma_s_; }
  /// Background noise intensity, c_b * alpha.
  [[nodiscard]] double sigma_b() const noexcept { return sigma_b_; }

  [[nodiscard]] bool noise_enabled() const noexcept { return sigma_s_ > 0.0 || sigma_b_ > 0.0; }

 private:
  friend ControlParams derive_params(double alpha, const BaseConstants& constants);
  ControlParams() = default;

  double alpha_ = 0.0;
  BaseConstants constants_{};
  double nu_ = 0.0;
  double lambda_id_ = 0.0;
  double sigma_s_ = 0.0;
  double sigma_b_ = 0.0;
};

/// Throws DomainError when alpha is outside [0,1] or a constant is negative
/// or non-finite.
[[nodiscard]] ControlParams derive_params(double alpha, const BaseConstants& constants = {});

/// Iteration count and virtual time step of the physics operator.
class OperatorSchedule {
 public:
  OperatorSchedule(std::size_t n_iters, double dtau);

  [[nodiscard]] std::size_t n_iters() const noexcept { return n_iters_; }
  [[nodiscard]] double dtau() const noexcept { return dtau_; }

 private:
  std::size_t n_iters_;
  double dtau_;
};

}  // namespace physattn
