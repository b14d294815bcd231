#pragma once

#include <array>
#include <string>

#include "moldopt/types.hpp"

namespace moldopt {

// affine map [lo,hi] <-> [-1,1]
double normalize(double x, double lo, double hi);
double denormalize(double z, double lo, double hi);

// operating ranges for the 10 setpoints and the 4 ambient variables
struct Bounds {
  std::array<double, 10> param_lo{};
  std::array<double, 10> param_hi{};
  std::array<double, 4> env_lo{};
  std::array<double, 4> env_hi{};

  static Bounds defaults();

  bool contains(const ProcessParams& p) const;
  bool contains(const EnvConditions& e) const;
  ProcessParams clip_params(const ProcessParams& p) const;
  ProcessParams midpoint() const;
  void validate() const;  // lo < hi everywhere
};

enum class StepMode { Small = 0, Large = 1 };

const char* to_string(StepMode m);
StepMode step_mode_from_string(const std::string& name);

// per-setpoint action step sizes: small = range/4, large = range/2.
// quant_* are optional output resolutions (setpoint granularity of a real
// controller); unused unless a caller explicitly quantizes.
struct StepSizes {
  std::array<double, 10> small{};
  std::array<double, 10> large{};
  std::array<double, 10> quant_small{};
  std::array<double, 10> quant_large{};

  static StepSizes from(const Bounds& b);
  const std::array<double, 10>& of(StepMode m) const {
    return m == StepMode::Small ? small : large;
  }
  const std::array<double, 10>& quant_of(StepMode m) const {
    return m == StepMode::Small ? quant_small : quant_large;
  }
};

}  // namespace moldopt
