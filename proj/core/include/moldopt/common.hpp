#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace moldopt {

inline constexpr double kPi = 3.14159265358979323846;

enum class Season { SpringFall = 0, Summer = 1, Winter = 2 };
enum class TariffTier { OffPeak = 0, MidPeak = 1, OnPeak = 2 };

const char* to_string(Season s);
const char* to_string(TariffTier t);
Season season_from_string(const std::string& name);
TariffTier tier_from_string(const std::string& name);

inline double clip(double x, double lo, double hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

// stateless stream derivation so sub-seeds (per episode, per cycle, ...)
// never collide with or depend on draw order of the parent stream
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// mt19937_64 engine with explicit output transforms: results depend only on
// the seed and call sequence, not on libstdc++ distribution internals
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Box-Muller, cosine branch only (stateless; two draws per sample)
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * kPi * u2);
  }

  double normal(double mu, double sigma) { return mu + sigma * normal(); }

  // uniform over {0, ..., n-1}; modulo bias is < n / 2^64
  int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<uint64_t>(n)); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace moldopt
