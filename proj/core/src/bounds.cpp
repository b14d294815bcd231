#include "moldopt/bounds.hpp"

#include <stdexcept>
#include <string>

#include "moldopt/common.hpp"

namespace moldopt {

double normalize(double x, double lo, double hi) {
  return 2.0 * (x - lo) / (hi - lo) - 1.0;
}

double denormalize(double z, double lo, double hi) {
  return lo + (z + 1.0) * 0.5 * (hi - lo);
}

Bounds Bounds::defaults() {
  Bounds b;
  //            v1  v2  v3   p1   p2   p3  x1  x2  x3  hold
  b.param_lo = {20, 20, 10, 120, 120, 130, 44, 32, 28, 0.0};
  b.param_hi = {40, 40, 30, 140, 140, 150, 48, 44, 32, 2.4};
  //          t_mach t_fact h_mach h_fact
  b.env_lo = {5.5, 5.6, 23.6, 23.0};
  b.env_hi = {21.8, 22.8, 62.4, 63.6};
  return b;
}

bool Bounds::contains(const ProcessParams& p) const {
  auto a = p.to_array();
  for (int i = 0; i < 10; ++i)
    if (a[i] < param_lo[i] || a[i] > param_hi[i]) return false;
  return true;
}

bool Bounds::contains(const EnvConditions& e) const {
  auto a = e.to_array();
  for (int i = 0; i < 4; ++i)
    if (a[i] < env_lo[i] || a[i] > env_hi[i]) return false;
  return true;
}

ProcessParams Bounds::clip_params(const ProcessParams& p) const {
  auto a = p.to_array();
  for (int i = 0; i < 10; ++i) a[i] = clip(a[i], param_lo[i], param_hi[i]);
  return ProcessParams::from_array(a);
}

ProcessParams Bounds::midpoint() const {
  std::array<double, 10> a;
  for (int i = 0; i < 10; ++i) a[i] = 0.5 * (param_lo[i] + param_hi[i]);
  return ProcessParams::from_array(a);
}

void Bounds::validate() const {
  for (int i = 0; i < 10; ++i)
    if (!(param_lo[i] < param_hi[i]))
      throw std::invalid_argument("bounds: param_lo >= param_hi at index " + std::to_string(i));
  for (int i = 0; i < 4; ++i)
    if (!(env_lo[i] < env_hi[i]))
      throw std::invalid_argument("bounds: env_lo >= env_hi at index " + std::to_string(i));
}

const char* to_string(StepMode m) { return m == StepMode::Small ? "small" : "large"; }

StepMode step_mode_from_string(const std::string& name) {
  if (name == "small") return StepMode::Small;
  if (name == "large") return StepMode::Large;
  throw std::invalid_argument("unknown step mode: " + name);
}

StepSizes StepSizes::from(const Bounds& b) {
  StepSizes s;
  for (int i = 0; i < 10; ++i) {
    double range = b.param_hi[i] - b.param_lo[i];
    s.small[i] = range / 4.0;
    s.large[i] = range / 2.0;
  }
  // controller setpoint granularity: speeds/positions/hold at 0.1 (fine) or
  // coarse steps; pressures at 1 bar (fine) / 20 bar (coarse)
  s.quant_small = {0.1, 0.1, 0.1, 1, 1, 1, 0.1, 0.1, 0.1, 0.1};
  s.quant_large = {5, 5, 5, 20, 20, 20, 1, 1, 1, 1};
  return s;
}

}  // namespace moldopt
