#include "physattn/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "physattn/errors.hpp"

namespace physattn {

namespace {

void require_constant(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    throw DomainError(std::string(name) + " must be a finite nonnegative real, got " +
                      std::to_string(value));
  }
}

}  // namespace

ControlParams derive_params(double alpha, const BaseConstants& constants) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must lie in [0,1], got " + std::to_string(alpha));
  }
  require_constant(constants.c_heat, "c_heat");
  require_constant(constants.c_id, "c_id");
  require_constant(constants.c_s, "c_s");
  require_constant(constants.c_b, "c_b");

  ControlParams p;
  p.alpha_ = alpha;
  p.constants_ = constants;
  p.nu_ = constants.c_heat * alpha;
  p.lambda_id_ = std::min(constants.c_id * alpha, 1.0);
  p.sigma_s_ = constants.c_s * (1.0 - alpha);
  p.sigma_b_ = constants.c_b * alpha;
  return p;
}

OperatorSchedule::OperatorSchedule(std::size_t n_iters, double dtau) : n_iters_(n_iters), dtau_(dtau) {
  if (n_iters_ < 1) throw DomainError("operator schedule needs n_iters >= 1");
  if (!(std::isfinite(dtau_) && dtau_ > 0.0)) {
    throw DomainError("operator schedule needs a finite dtau > 0, got " + std::to_string(dtau_));
  }
}

}  // namespace physattn
