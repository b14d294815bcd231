#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "moldopt/bounds.hpp"
#include "moldopt/economics.hpp"
#include "moldopt/plant.hpp"

namespace moldopt {

inline constexpr int kObsDim = 23;  // 10 setpoints + 4 ambient + 9 price one-hot
inline constexpr int kActDim = 10;
inline constexpr int kEpisodeSteps = 144;  // 24 h at 10-minute decisions
inline constexpr double kStepSeconds = 600.0;

using State = std::array<double, kObsDim>;
using Action = std::array<double, kActDim>;

// one-hot slot for the (season, tier) price context; season-major
int encode_price_index(Season s, TariffTier t);

State build_state(const ProcessParams& p, const EnvConditions& e, Season s, TariffTier t,
                  const Bounds& b);

// p' = clip(p + a * step, bounds), with a clamped to [-1,1] componentwise
ProcessParams apply_action(const ProcessParams& p, const Action& a, const StepSizes& s,
                           StepMode mode, const Bounds& b);

// optional setpoint granularity: snap each parameter to lo + round(k)*res
ProcessParams quantize_params(const ProcessParams& p, const std::array<double, 10>& resolution,
                              const Bounds& b);

enum class ScenarioKind { Training, Seasonal };

const char* to_string(ScenarioKind k);

struct ScenarioStep {
  EnvConditions env;
  Season season = Season::SpringFall;
  TariffTier tier = TariffTier::OffPeak;
};

// fixed 24-hour ambient + tariff trace; one entry per decision step
struct Scenario {
  ScenarioKind kind = ScenarioKind::Training;
  uint64_t seed = 0;
  Season season = Season::SpringFall;  // tag; per-step season is authoritative
  std::vector<ScenarioStep> steps;

  void save(const std::string& path) const;
  static Scenario load(const std::string& path);
  std::string to_json_text() const;
  static Scenario from_json_text(const std::string& text);
};

// smooth bounded ambient walk + uniformly drawn season + sticky-tier Markov
// chain; per-variable excursion stays within 10% of its full range
Scenario make_training_scenario(uint64_t seed, const Bounds& b = Bounds::defaults());

// sinusoidal day profile for the season, tariff tiers from the schedule
Scenario make_seasonal_scenario(Season s, const TariffSchedule& ts = TariffSchedule::defaults());

// ambient conditions at a continuous time of day (machine == factory here)
EnvConditions seasonal_env(Season s, double t_seconds);

struct Transition {
  State state{};
  State next_state{};
  Action action_applied{};  // clamped action actually used
  double reward = 0;
  bool done = false;
  // diagnostics of the simulated cycle
  double cycle_seconds = 0, p_max = 0, fill = 0, price = 0, profit = 0;
  int good_count = 0;
};

class Env {
 public:
  Env(Scenario scenario, PlantConfig plant, CostParams costs, TariffSchedule tariff,
      Bounds bounds, StepMode mode);

  State reset_midpoint();
  State reset_random(Rng& rng);
  State reset_explicit(const ProcessParams& p);

  Transition step(const Action& a);

  bool done() const { return t_ >= static_cast<int>(scenario_.steps.size()); }
  int t() const { return t_; }
  int episode_steps() const { return static_cast<int>(scenario_.steps.size()); }
  const ProcessParams& params() const { return params_; }
  const Scenario& scenario() const { return scenario_; }
  StepMode step_mode() const { return mode_; }
  const Bounds& bounds() const { return bounds_; }
  State observe() const;

 private:
  Scenario scenario_;
  PlantConfig plant_;
  CostParams costs_;
  TariffSchedule tariff_;
  Bounds bounds_;
  StepSizes steps_;
  StepMode mode_;
  ProcessParams params_;
  int t_ = 0;
  bool started_ = false;
};

using EnvFactory = std::function<Env(int episode_index)>;

}  // namespace moldopt
