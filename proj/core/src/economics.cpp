#include "moldopt/economics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace moldopt {

TariffTier TariffSchedule::classify(Season s, int minute_of_day) const {
  if (minute_of_day < 0 || minute_of_day >= 1440)
    throw std::invalid_argument("minute_of_day out of [0,1440): " + std::to_string(minute_of_day));
  for (const auto& w : windows[static_cast<int>(s)])
    if (minute_of_day >= w.start_min && minute_of_day < w.end_min) return w.tier;
  throw std::logic_error("tariff windows do not cover minute " + std::to_string(minute_of_day));
}

double TariffSchedule::unit_price(Season s, TariffTier t) const {
  return price_usd_per_kwh[static_cast<int>(s)][static_cast<int>(t)];
}

void TariffSchedule::validate() const {
  for (int s = 0; s < 3; ++s) {
    for (int t = 0; t < 3; ++t)
      if (!(price_usd_per_kwh[s][t] > 0))
        throw std::invalid_argument("tariff price must be positive");
    auto ws = windows[s];
    if (ws.empty()) throw std::invalid_argument("tariff season has no windows");
    std::sort(ws.begin(), ws.end(),
              [](const TariffWindow& a, const TariffWindow& b) { return a.start_min < b.start_min; });
    int cursor = 0;
    for (const auto& w : ws) {
      if (w.start_min != cursor || w.end_min <= w.start_min)
        throw std::invalid_argument("tariff windows must partition [0,1440) without gap or overlap");
      cursor = w.end_min;
    }
    if (cursor != 1440)
      throw std::invalid_argument("tariff windows must cover the full day");
  }
}

TariffSchedule TariffSchedule::defaults() {
  TariffSchedule ts;
  auto set = [&](Season s, double off, double mid, double on) {
    int i = static_cast<int>(s);
    ts.price_usd_per_kwh[i][0] = off;
    ts.price_usd_per_kwh[i][1] = mid;
    ts.price_usd_per_kwh[i][2] = on;
  };
  set(Season::SpringFall, 0.0995, 0.1220, 0.1527);
  set(Season::Summer, 0.0995, 0.1524, 0.2345);
  set(Season::Winter, 0.1065, 0.1526, 0.2101);

  using T = TariffTier;
  auto win = [](int sh, int sm, int eh, int em, T t) {
    return TariffWindow{sh * 60 + sm, eh * 60 + em, t};
  };
  // spring/fall and summer share the same window layout
  for (Season s : {Season::SpringFall, Season::Summer}) {
    auto& w = ts.windows[static_cast<int>(s)];
    w = {
        win(0, 0, 8, 0, T::OffPeak), win(22, 0, 24, 0, T::OffPeak),
        win(8, 0, 11, 0, T::MidPeak), win(12, 0, 13, 0, T::MidPeak),
        win(11, 0, 12, 0, T::OnPeak), win(13, 0, 18, 0, T::OnPeak),
        win(18, 0, 22, 0, T::OnPeak),
    };
  }
  {
    auto& w = ts.windows[static_cast<int>(Season::Winter)];
    w = {
        win(0, 0, 8, 0, T::OffPeak), win(22, 0, 24, 0, T::OffPeak),
        win(8, 0, 9, 0, T::MidPeak), win(12, 0, 16, 0, T::MidPeak),
        win(9, 0, 12, 0, T::OnPeak), win(16, 0, 19, 0, T::OnPeak),
        win(19, 0, 22, 0, T::OnPeak),
    };
  }
  return ts;
}

void CostParams::validate() const {
  if (!(sale_price > 0) || !(resin_cost >= 0) || !(mold_cost_low >= 0) ||
      !(mold_cost_high >= 0) || !(mold_threshold > 0))
    throw std::invalid_argument("cost params must be non-negative with positive sale price");
  if (energy.empty()) throw std::invalid_argument("energy tiers empty");
  double prev = 0;
  for (const auto& t : energy) {
    if (!(t.kwh_per_cavity >= 0) || !(t.below_pressure > prev))
      throw std::invalid_argument("energy tiers must have increasing pressure breakpoints");
    prev = t.below_pressure;
  }
}

double mold_cost_per_cavity(double p_max, const CostParams& c) {
  if (!(p_max > 0)) throw std::invalid_argument("p_max must be positive");
  return p_max < c.mold_threshold ? c.mold_cost_low : c.mold_cost_high;
}

double electricity_cost_per_cavity(double p_max, double price_usd_per_kwh, const CostParams& c) {
  if (!(p_max > 0)) throw std::invalid_argument("p_max must be positive");
  if (!(price_usd_per_kwh > 0)) throw std::invalid_argument("price must be positive");
  for (const auto& t : c.energy)
    if (p_max < t.below_pressure) return t.kwh_per_cavity * price_usd_per_kwh;
  return c.energy.back().kwh_per_cavity * price_usd_per_kwh;
}

double cycle_profit(const std::array<uint8_t, kCavities>& good_flags, double p_max,
                    double price_usd_per_kwh, const CostParams& c) {
  int good = 0;
  for (auto f : good_flags) good += f ? 1 : 0;
  double cost_per_cavity = c.resin_cost + mold_cost_per_cavity(p_max, c) +
                           electricity_cost_per_cavity(p_max, price_usd_per_kwh, c);
  return c.sale_price * good - kCavities * cost_per_cavity;
}

double interval_reward(double cycle_seconds, double profit_per_cycle, double interval_seconds) {
  if (!(cycle_seconds > 0)) throw std::invalid_argument("cycle_seconds must be positive");
  return (interval_seconds / cycle_seconds) * profit_per_cycle;
}

}  // namespace moldopt
