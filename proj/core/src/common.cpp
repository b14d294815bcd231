#include "moldopt/common.hpp"

#include <algorithm>
#include <stdexcept>

namespace moldopt {

const char* to_string(Season s) {
  switch (s) {
    case Season::SpringFall: return "springfall";
    case Season::Summer: return "summer";
    case Season::Winter: return "winter";
  }
  return "?";
}

const char* to_string(TariffTier t) {
  switch (t) {
    case TariffTier::OffPeak: return "offpeak";
    case TariffTier::MidPeak: return "midpeak";
    case TariffTier::OnPeak: return "onpeak";
  }
  return "?";
}

namespace {
std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}
}  // namespace

Season season_from_string(const std::string& name) {
  std::string s = lower(name);
  if (s == "springfall" || s == "spring" || s == "fall" || s == "autumn" || s == "spring/fall")
    return Season::SpringFall;
  if (s == "summer") return Season::Summer;
  if (s == "winter") return Season::Winter;
  throw std::invalid_argument("unknown season: " + name);
}

TariffTier tier_from_string(const std::string& name) {
  std::string s = lower(name);
  if (s == "offpeak" || s == "off" || s == "off-peak") return TariffTier::OffPeak;
  if (s == "midpeak" || s == "mid" || s == "mid-peak") return TariffTier::MidPeak;
  if (s == "onpeak" || s == "on" || s == "on-peak") return TariffTier::OnPeak;
  throw std::invalid_argument("unknown tariff tier: " + name);
}

}  // namespace moldopt
