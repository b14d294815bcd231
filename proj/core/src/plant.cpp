#include "moldopt/plant.hpp"

#include <algorithm>
#include <stdexcept>

namespace moldopt {

void PlantConfig::validate() const {
  if (!(x_start > 0) || !(speed_scale > 0) || !(cool_base > 0))
    throw std::invalid_argument("plant config: x_start, speed_scale, cool_base must be positive");
  if (!(band_low < band_high))
    throw std::invalid_argument("plant config: band_low must be below band_high");
}

double max_pressure(const ProcessParams& p) {
  return std::max({p.p1, p.p2, p.p3});
}

double cycle_time(const ProcessParams& p, const EnvConditions& e, const PlantConfig& cfg) {
  double d1 = cfg.x_start - p.x1;
  double d2 = p.x1 - p.x2;
  double d3 = p.x2 - p.x3;
  if (d1 < 0 || d2 < 0 || d3 < 0)
    throw std::invalid_argument("cycle_time: switchover positions must be descending from x_start");
  if (!(p.v1 > 0) || !(p.v2 > 0) || !(p.v3 > 0))
    throw std::invalid_argument("cycle_time: speeds must be positive");
  double fill_s = d1 / (cfg.speed_scale * p.v1) + d2 / (cfg.speed_scale * p.v2) +
                  d3 / (cfg.speed_scale * p.v3);
  double cool_s = cfg.cool_base + cfg.cool_temp_coeff * (e.t_machine - 15.0) +
                  cfg.cool_hum_coeff * (e.h_machine - 45.0);
  return fill_s + p.hold + cool_s;
}

namespace {
inline double n01(double x, double lo, double hi) { return (x - lo) / (hi - lo); }
}  // namespace

double fill_index(const ProcessParams& p, const EnvConditions& e, const Bounds& b,
                  const PlantConfig& cfg) {
  const auto& lo = b.param_lo;
  const auto& hi = b.param_hi;
  double v_bar = (n01(p.v1, lo[0], hi[0]) + n01(p.v2, lo[1], hi[1]) + n01(p.v3, lo[2], hi[2])) / 3.0;
  double p_bar = (n01(p.p1, lo[3], hi[3]) + n01(p.p2, lo[4], hi[4]) + n01(p.p3, lo[5], hi[5])) / 3.0;
  double h_bar = n01(p.hold, lo[9], hi[9]);
  double t_bar = n01(e.t_machine, b.env_lo[0], b.env_hi[0]);
  double rh_bar = n01(e.h_machine, b.env_lo[2], b.env_hi[2]);
  return cfg.w_speed * v_bar + cfg.w_pressure * p_bar + cfg.w_hold * h_bar -
         cfg.w_temp * (1.0 - t_bar) - cfg.w_hum * rh_bar + cfg.fill_bias;
}

std::array<uint8_t, kCavities> cavity_flags(double fill, const PlantConfig& cfg) {
  std::array<uint8_t, kCavities> good{};
  for (int i = 0; i < kCavities; ++i) {
    double lo = cfg.band_low + cfg.cavity_offset[i];
    double hi = cfg.band_high + cfg.cavity_offset[i];
    good[i] = (fill >= lo && fill <= hi) ? 1 : 0;
  }
  return good;
}

PlantOutcome simulate_cycle(const ProcessParams& p, const EnvConditions& e, const Bounds& b,
                            const PlantConfig& cfg) {
  PlantOutcome o;
  o.cycle_seconds = cycle_time(p, e, cfg);
  o.p_max = max_pressure(p);
  o.fill = fill_index(p, e, b, cfg);
  o.good = cavity_flags(o.fill, cfg);
  o.good_count = 0;
  for (auto f : o.good) o.good_count += f;
  return o;
}

double interval_reward(const PlantOutcome& o, double price_usd_per_kwh, const CostParams& c,
                       double interval_seconds) {
  double profit = cycle_profit(o.good, o.p_max, price_usd_per_kwh, c);
  return interval_reward(o.cycle_seconds, profit, interval_seconds);
}

}  // namespace moldopt
