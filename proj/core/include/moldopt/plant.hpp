#pragma once

#include <array>
#include <cstdint>

#include "moldopt/bounds.hpp"
#include "moldopt/economics.hpp"
#include "moldopt/types.hpp"

namespace moldopt {

// closed-form stand-in for a real press: deterministic cycle time and a scalar
// fill index that decides per-cavity quality through a tolerance band
struct PlantConfig {
  double x_start = 50.0;        // screw start position [mm]
  double speed_scale = 1.0;     // [mm/s per % speed]
  double cool_base = 37.0;      // cooling + reset time at nominal ambient [s]
  double cool_temp_coeff = 0.08;  // [s per degC above 15]
  double cool_hum_coeff = 0.01;   // [s per %RH above 45]

  // fill index weights over [0,1]-normalized drives and ambient
  double w_speed = 0.35;
  double w_pressure = 0.40;
  double w_hold = 0.15;
  double w_temp = 0.25;  // cold machine -> short-shot pull (enters as -(1 - t_norm))
  double w_hum = 0.05;   // humid machine -> slight short-shot pull
  double fill_bias = 0.20;

  double band_low = 0.35;   // below: short shot
  double band_high = 0.75;  // above: flash
  std::array<double, kCavities> cavity_offset = {0.0, +0.01, -0.01, +0.02};

  void validate() const;
};

struct PlantOutcome {
  double cycle_seconds = 0;
  double p_max = 0;
  double fill = 0;
  std::array<uint8_t, kCavities> good{};
  int good_count = 0;
};

// peak packing pressure over the three stages
double max_pressure(const ProcessParams& p);

// stage travel times + hold + ambient-dependent cooling
double cycle_time(const ProcessParams& p, const EnvConditions& e, const PlantConfig& cfg = {});

// scalar mold-filling quality index; bounds give the [0,1] normalization
double fill_index(const ProcessParams& p, const EnvConditions& e, const Bounds& b,
                  const PlantConfig& cfg = {});

// cavity i is good iff band_low + offset_i <= fill <= band_high + offset_i
std::array<uint8_t, kCavities> cavity_flags(double fill, const PlantConfig& cfg = {});

PlantOutcome simulate_cycle(const ProcessParams& p, const EnvConditions& e, const Bounds& b,
                            const PlantConfig& cfg = {});

// convenience: reward of one cycle at the given unit electricity price
double interval_reward(const PlantOutcome& o, double price_usd_per_kwh,
                       const CostParams& c = {}, double interval_seconds = 600.0);

}  // namespace moldopt
