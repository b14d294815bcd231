#include "moldopt/env.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace moldopt {

using json = nlohmann::json;

int encode_price_index(Season s, TariffTier t) {
  return 3 * static_cast<int>(s) + static_cast<int>(t);
}

State build_state(const ProcessParams& p, const EnvConditions& e, Season s, TariffTier t,
                  const Bounds& b) {
  State st{};
  auto pa = p.to_array();
  for (int i = 0; i < 10; ++i) st[i] = normalize(pa[i], b.param_lo[i], b.param_hi[i]);
  auto ea = e.to_array();
  for (int i = 0; i < 4; ++i) st[10 + i] = normalize(ea[i], b.env_lo[i], b.env_hi[i]);
  st[14 + encode_price_index(s, t)] = 1.0;
  return st;
}

ProcessParams apply_action(const ProcessParams& p, const Action& a, const StepSizes& s,
                           StepMode mode, const Bounds& b) {
  const auto& step = s.of(mode);
  auto pa = p.to_array();
  for (int i = 0; i < 10; ++i) {
    double ai = clip(a[i], -1.0, 1.0);
    pa[i] = clip(pa[i] + ai * step[i], b.param_lo[i], b.param_hi[i]);
  }
  return ProcessParams::from_array(pa);
}

ProcessParams quantize_params(const ProcessParams& p, const std::array<double, 10>& resolution,
                              const Bounds& b) {
  auto pa = p.to_array();
  for (int i = 0; i < 10; ++i) {
    if (!(resolution[i] > 0)) continue;
    double k = std::round((pa[i] - b.param_lo[i]) / resolution[i]);
    pa[i] = clip(b.param_lo[i] + k * resolution[i], b.param_lo[i], b.param_hi[i]);
  }
  return ProcessParams::from_array(pa);
}

const char* to_string(ScenarioKind k) {
  return k == ScenarioKind::Training ? "training" : "seasonal";
}

// -- scenario generation -- //

Scenario make_training_scenario(uint64_t seed, const Bounds& b) {
  Rng rng(seed);
  Scenario sc;
  sc.kind = ScenarioKind::Training;
  sc.seed = seed;
  sc.season = static_cast<Season>(rng.uniform_int(3));

  // ambient walk: mean-reverting offset around a base point, offset clipped to
  // +-half the allowed excursion so trajectory spread stays within 10% of range
  const double kExcursionFrac = 0.10;
  const double kMeanReversion = 0.1;
  const double kWalkSigmaFrac = 0.1;  // of the excursion band
  std::array<double, 4> base{}, amp{}, off{};
  for (int i = 0; i < 4; ++i) {
    double range = b.env_hi[i] - b.env_lo[i];
    amp[i] = kExcursionFrac * range;
    base[i] = rng.uniform(b.env_lo[i] + amp[i] / 2, b.env_hi[i] - amp[i] / 2);
    off[i] = 0.0;
  }

  TariffTier tier = static_cast<TariffTier>(rng.uniform_int(3));
  const double kTierStayProb = 0.9;

  sc.steps.resize(kEpisodeSteps);
  for (int t = 0; t < kEpisodeSteps; ++t) {
    std::array<double, 4> vals{};
    for (int i = 0; i < 4; ++i) {
      vals[i] = clip(base[i] + off[i], b.env_lo[i], b.env_hi[i]);
      off[i] = clip((1.0 - kMeanReversion) * off[i] + kWalkSigmaFrac * amp[i] * rng.normal(),
                    -amp[i] / 2, amp[i] / 2);
    }
    sc.steps[t].env = EnvConditions::from_array(vals);
    sc.steps[t].season = sc.season;
    sc.steps[t].tier = tier;
    if (rng.uniform01() >= kTierStayProb) {
      int other = rng.uniform_int(2);  // pick one of the two other tiers
      int cur = static_cast<int>(tier);
      tier = static_cast<TariffTier>((cur + 1 + other) % 3);
    }
  }
  return sc;
}

EnvConditions seasonal_env(Season s, double t_seconds) {
  double t0 = 14.0, h0 = 45.0;
  switch (s) {
    case Season::SpringFall: t0 = 14.0; h0 = 45.0; break;
    case Season::Summer: t0 = 19.0; h0 = 55.0; break;
    case Season::Winter: t0 = 8.0; h0 = 30.0; break;
  }
  double phase = std::sin(2.0 * kPi * (t_seconds - 9.0 * 3600.0) / 86400.0);
  EnvConditions e;
  e.t_machine = e.t_factory = t0 + 2.0 * phase;
  e.h_machine = e.h_factory = h0 + 5.0 * phase;
  return e;
}

Scenario make_seasonal_scenario(Season s, const TariffSchedule& ts) {
  Scenario sc;
  sc.kind = ScenarioKind::Seasonal;
  sc.seed = 0;
  sc.season = s;
  sc.steps.resize(kEpisodeSteps);
  for (int t = 0; t < kEpisodeSteps; ++t) {
    sc.steps[t].env = seasonal_env(s, t * kStepSeconds);
    sc.steps[t].season = s;
    sc.steps[t].tier = ts.classify(s, (t * 10) % 1440);
  }
  return sc;
}

// -- scenario serialization -- //

std::string Scenario::to_json_text() const {
  json j;
  j["kind"] = to_string(kind);
  j["seed"] = seed;
  j["season"] = to_string(season);
  json steps_j = json::array();
  for (const auto& st : steps) {
    steps_j.push_back({{"t_machine", st.env.t_machine},
                       {"t_factory", st.env.t_factory},
                       {"h_machine", st.env.h_machine},
                       {"h_factory", st.env.h_factory},
                       {"season", to_string(st.season)},
                       {"tier", to_string(st.tier)}});
  }
  j["steps"] = std::move(steps_j);
  return j.dump(2);
}

Scenario Scenario::from_json_text(const std::string& text) {
  json j = json::parse(text);
  Scenario sc;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "training")
    sc.kind = ScenarioKind::Training;
  else if (kind == "seasonal")
    sc.kind = ScenarioKind::Seasonal;
  else
    throw std::invalid_argument("scenario: unknown kind: " + kind);
  sc.seed = j.at("seed").get<uint64_t>();
  sc.season = season_from_string(j.at("season").get<std::string>());
  for (const auto& sj : j.at("steps")) {
    ScenarioStep st;
    st.env.t_machine = sj.at("t_machine").get<double>();
    st.env.t_factory = sj.at("t_factory").get<double>();
    st.env.h_machine = sj.at("h_machine").get<double>();
    st.env.h_factory = sj.at("h_factory").get<double>();
    st.season = season_from_string(sj.at("season").get<std::string>());
    st.tier = tier_from_string(sj.at("tier").get<std::string>());
    sc.steps.push_back(st);
  }
  if (sc.steps.empty()) throw std::invalid_argument("scenario: no steps");
  return sc;
}

void Scenario::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << to_json_text() << "\n";
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open for read: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_json_text(ss.str());
}

// -- environment -- //

Env::Env(Scenario scenario, PlantConfig plant, CostParams costs, TariffSchedule tariff,
         Bounds bounds, StepMode mode)
    : scenario_(std::move(scenario)),
      plant_(plant),
      costs_(std::move(costs)),
      tariff_(std::move(tariff)),
      bounds_(bounds),
      steps_(StepSizes::from(bounds)),
      mode_(mode) {
  if (scenario_.steps.empty()) throw std::invalid_argument("env: scenario has no steps");
  bounds_.validate();
  plant_.validate();
  costs_.validate();
  tariff_.validate();
}

State Env::observe() const {
  int idx = std::min(t_, static_cast<int>(scenario_.steps.size()) - 1);
  const auto& st = scenario_.steps[idx];
  return build_state(params_, st.env, st.season, st.tier, bounds_);
}

State Env::reset_midpoint() {
  params_ = bounds_.midpoint();
  t_ = 0;
  started_ = true;
  return observe();
}

State Env::reset_random(Rng& rng) {
  std::array<double, 10> a{};
  for (int i = 0; i < 10; ++i) a[i] = rng.uniform(bounds_.param_lo[i], bounds_.param_hi[i]);
  params_ = ProcessParams::from_array(a);
  t_ = 0;
  started_ = true;
  return observe();
}

State Env::reset_explicit(const ProcessParams& p) {
  if (!bounds_.contains(p)) throw std::invalid_argument("env: initial setpoints out of bounds");
  params_ = p;
  t_ = 0;
  started_ = true;
  return observe();
}

Transition Env::step(const Action& a) {
  if (!started_) throw std::logic_error("env: step before reset");
  if (done()) throw std::logic_error("env: episode finished; reset required");

  Transition tr;
  tr.state = observe();

  const auto& sstep = scenario_.steps[t_];
  for (int i = 0; i < 10; ++i) tr.action_applied[i] = clip(a[i], -1.0, 1.0);
  params_ = apply_action(params_, tr.action_applied, steps_, mode_, bounds_);

  PlantOutcome out = simulate_cycle(params_, sstep.env, bounds_, plant_);
  tr.price = tariff_.unit_price(sstep.season, sstep.tier);
  tr.profit = cycle_profit(out.good, out.p_max, tr.price, costs_);
  tr.reward = interval_reward(out.cycle_seconds, tr.profit, kStepSeconds);
  tr.cycle_seconds = out.cycle_seconds;
  tr.p_max = out.p_max;
  tr.fill = out.fill;
  tr.good_count = out.good_count;

  ++t_;
  tr.done = done();
  tr.next_state = observe();
  return tr;
}

}  // namespace moldopt
