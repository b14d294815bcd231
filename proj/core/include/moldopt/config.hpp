#pragma once

#include <string>

#include "moldopt/env.hpp"
#include "moldopt/ga.hpp"
#include "moldopt/ppo.hpp"
#include "moldopt/sac.hpp"

namespace moldopt {

// one bundle of every tunable the toolkit reads; JSON files override fields
// selectively on top of the built-in defaults
struct RunConfig {
  PlantConfig plant;
  CostParams costs;
  TariffSchedule tariff = TariffSchedule::defaults();
  Bounds bounds = Bounds::defaults();
  StepMode step_mode = StepMode::Large;
  PpoConfig ppo;
  SacConfig sac;
  GaConfig ga;
  int deploy_steps_ppo = 7;   // policy refinements per cycle at deployment
  int deploy_steps_sac = 10;
  uint64_t scenario_seed_base = 0;  // folded into per-episode scenario seeds

  void validate() const;
  std::string to_json_text() const;
  static RunConfig from_json_text(const std::string& text);  // partial override
  void save(const std::string& path) const;
  static RunConfig load(const std::string& path);
};

// fresh training-scenario env per episode, deterministically derived from
// (seed, episode index)
EnvFactory make_training_env_factory(const RunConfig& rc, uint64_t seed);

// fixed-trace env (constant or externally built scenario)
Env make_env_for_scenario(const RunConfig& rc, Scenario sc);

}  // namespace moldopt
