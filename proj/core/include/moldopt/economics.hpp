#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "moldopt/common.hpp"

namespace moldopt {

inline constexpr int kCavities = 4;

// half-open window [start_min, end_min) in minutes of day
struct TariffWindow {
  int start_min = 0;
  int end_min = 0;
  TariffTier tier = TariffTier::OffPeak;
};

// time-of-use electricity pricing: per-season unit prices and tier windows
struct TariffSchedule {
  double price_usd_per_kwh[3][3] = {};          // [season][tier]
  std::array<std::vector<TariffWindow>, 3> windows;  // [season]

  TariffTier classify(Season s, int minute_of_day) const;
  double unit_price(Season s, TariffTier t) const;
  void validate() const;  // positive prices; windows partition [0,1440)

  static TariffSchedule defaults();
};

struct EnergyTier {
  double kwh_per_cavity = 0;
  double below_pressure = 0;  // applies while p_max < below_pressure
};

struct CostParams {
  double sale_price = 0.2;          // revenue per good cavity [$]
  double resin_cost = 0.04;         // material per cavity per cycle [$]
  double mold_cost_low = 0.025;     // wear per cavity, p_max below threshold [$]
  double mold_cost_high = 0.02775;  // wear per cavity at/above threshold [$]
  double mold_threshold = 140.0;    // [bar]
  std::vector<EnergyTier> energy = {{0.2, 135.0}, {0.25, 145.0}, {0.275, 1e300}};

  void validate() const;
};

// per-cavity mold wear cost for the cycle's peak packing pressure
double mold_cost_per_cavity(double p_max, const CostParams& c = {});

// per-cavity electricity cost: tiered kWh draw times the current unit price
double electricity_cost_per_cavity(double p_max, double price_usd_per_kwh,
                                   const CostParams& c = {});

// profit of one cycle: revenue over good cavities minus per-cavity costs
// (resin + mold wear + electricity) over all cavities
double cycle_profit(const std::array<uint8_t, kCavities>& good_flags, double p_max,
                    double price_usd_per_kwh, const CostParams& c = {});

// profit rate over a fixed decision interval: (interval / cycle_seconds) * profit
double interval_reward(double cycle_seconds, double profit_per_cycle,
                       double interval_seconds = 600.0);

}  // namespace moldopt
