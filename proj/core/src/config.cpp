#include "moldopt/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace moldopt {

using nlohmann::json;

void RunConfig::validate() const {
  plant.validate();
  costs.validate();
  tariff.validate();
  bounds.validate();
  ppo.validate();
  sac.validate();
  ga.validate();
  if (deploy_steps_ppo < 1 || deploy_steps_sac < 1)
    throw std::invalid_argument("config: deploy step counts must be >= 1");
}

namespace {

json tariff_to_json(const TariffSchedule& ts) {
  json prices, windows;
  for (Season s : {Season::SpringFall, Season::Summer, Season::Winter}) {
    const int si = static_cast<int>(s);
    prices[to_string(s)] = {ts.price_usd_per_kwh[si][0], ts.price_usd_per_kwh[si][1],
                            ts.price_usd_per_kwh[si][2]};
    json wins = json::array();
    for (const TariffWindow& w : ts.windows[si])
      wins.push_back({{"start_min", w.start_min}, {"end_min", w.end_min},
                      {"tier", to_string(w.tier)}});
    windows[to_string(s)] = wins;
  }
  return json{{"prices_usd_per_kwh", prices}, {"windows", windows}};
}

void tariff_from_json(const json& j, TariffSchedule& ts) {
  if (j.contains("prices_usd_per_kwh")) {
    const json& p = j.at("prices_usd_per_kwh");
    for (Season s : {Season::SpringFall, Season::Summer, Season::Winter}) {
      if (!p.contains(to_string(s))) continue;
      const auto v = p.at(to_string(s)).get<std::vector<double>>();
      if (v.size() != 3) throw std::invalid_argument("tariff prices need 3 tiers per season");
      for (int t = 0; t < 3; ++t) ts.price_usd_per_kwh[static_cast<int>(s)][t] = v[t];
    }
  }
  if (j.contains("windows")) {
    const json& ws = j.at("windows");
    for (Season s : {Season::SpringFall, Season::Summer, Season::Winter}) {
      if (!ws.contains(to_string(s))) continue;
      std::vector<TariffWindow> wins;
      for (const json& w : ws.at(to_string(s)))
        wins.push_back({w.at("start_min").get<int>(), w.at("end_min").get<int>(),
                        tier_from_string(w.at("tier").get<std::string>())});
      ts.windows[static_cast<int>(s)] = std::move(wins);
    }
  }
}

json plant_to_json(const PlantConfig& p) {
  return json{{"x_start", p.x_start},
              {"speed_scale", p.speed_scale},
              {"cool_base", p.cool_base},
              {"cool_temp_coeff", p.cool_temp_coeff},
              {"cool_hum_coeff", p.cool_hum_coeff},
              {"w_speed", p.w_speed},
              {"w_pressure", p.w_pressure},
              {"w_hold", p.w_hold},
              {"w_temp", p.w_temp},
              {"w_hum", p.w_hum},
              {"fill_bias", p.fill_bias},
              {"band_low", p.band_low},
              {"band_high", p.band_high},
              {"cavity_offset", p.cavity_offset}};
}

void plant_from_json(const json& j, PlantConfig& p) {
  p.x_start = j.value("x_start", p.x_start);
  p.speed_scale = j.value("speed_scale", p.speed_scale);
  p.cool_base = j.value("cool_base", p.cool_base);
  p.cool_temp_coeff = j.value("cool_temp_coeff", p.cool_temp_coeff);
  p.cool_hum_coeff = j.value("cool_hum_coeff", p.cool_hum_coeff);
  p.w_speed = j.value("w_speed", p.w_speed);
  p.w_pressure = j.value("w_pressure", p.w_pressure);
  p.w_hold = j.value("w_hold", p.w_hold);
  p.w_temp = j.value("w_temp", p.w_temp);
  p.w_hum = j.value("w_hum", p.w_hum);
  p.fill_bias = j.value("fill_bias", p.fill_bias);
  p.band_low = j.value("band_low", p.band_low);
  p.band_high = j.value("band_high", p.band_high);
  if (j.contains("cavity_offset"))
    p.cavity_offset = j.at("cavity_offset").get<std::array<double, kCavities>>();
}

json costs_to_json(const CostParams& c) {
  json tiers = json::array();
  for (const EnergyTier& t : c.energy)
    tiers.push_back({{"kwh_per_cavity", t.kwh_per_cavity}, {"below_pressure", t.below_pressure}});
  return json{{"sale_price", c.sale_price},       {"resin_cost", c.resin_cost},
              {"mold_cost_low", c.mold_cost_low}, {"mold_cost_high", c.mold_cost_high},
              {"mold_threshold", c.mold_threshold}, {"energy", tiers}};
}

void costs_from_json(const json& j, CostParams& c) {
  c.sale_price = j.value("sale_price", c.sale_price);
  c.resin_cost = j.value("resin_cost", c.resin_cost);
  c.mold_cost_low = j.value("mold_cost_low", c.mold_cost_low);
  c.mold_cost_high = j.value("mold_cost_high", c.mold_cost_high);
  c.mold_threshold = j.value("mold_threshold", c.mold_threshold);
  if (j.contains("energy")) {
    c.energy.clear();
    for (const json& t : j.at("energy"))
      c.energy.push_back(
          {t.at("kwh_per_cavity").get<double>(), t.at("below_pressure").get<double>()});
  }
}

json bounds_to_json(const Bounds& b) {
  return json{{"param_lo", b.param_lo},
              {"param_hi", b.param_hi},
              {"env_lo", b.env_lo},
              {"env_hi", b.env_hi}};
}

void bounds_from_json(const json& j, Bounds& b) {
  if (j.contains("param_lo")) b.param_lo = j.at("param_lo").get<std::array<double, 10>>();
  if (j.contains("param_hi")) b.param_hi = j.at("param_hi").get<std::array<double, 10>>();
  if (j.contains("env_lo")) b.env_lo = j.at("env_lo").get<std::array<double, 4>>();
  if (j.contains("env_hi")) b.env_hi = j.at("env_hi").get<std::array<double, 4>>();
}

json ppo_to_json(const PpoConfig& c) {
  return json{{"hidden", c.hidden},
              {"activation", to_string(c.activation)},
              {"policy_lr", c.policy_lr},
              {"value_lr", c.value_lr},
              {"total_steps", c.total_steps},
              {"rollout_steps", c.rollout_steps},
              {"gamma", c.gamma},
              {"clip_eps", c.clip_eps},
              {"gae_lambda", c.gae_lambda},
              {"entropy_coef", c.entropy_coef},
              {"epochs", c.epochs},
              {"minibatch", c.minibatch},
              {"grad_clip", c.grad_clip},
              {"logstd_init", c.logstd_init},
              {"normalize_advantages", c.normalize_advantages},
              {"random_episode_start", c.random_episode_start}};
}

void ppo_from_json(const json& j, PpoConfig& c) {
  if (j.contains("hidden")) c.hidden = j.at("hidden").get<std::vector<int>>();
  if (j.contains("activation"))
    c.activation = activation_from_string(j.at("activation").get<std::string>());
  c.policy_lr = j.value("policy_lr", c.policy_lr);
  c.value_lr = j.value("value_lr", c.value_lr);
  c.total_steps = j.value("total_steps", c.total_steps);
  c.rollout_steps = j.value("rollout_steps", c.rollout_steps);
  c.gamma = j.value("gamma", c.gamma);
  c.clip_eps = j.value("clip_eps", c.clip_eps);
  c.gae_lambda = j.value("gae_lambda", c.gae_lambda);
  c.entropy_coef = j.value("entropy_coef", c.entropy_coef);
  c.epochs = j.value("epochs", c.epochs);
  c.minibatch = j.value("minibatch", c.minibatch);
  c.grad_clip = j.value("grad_clip", c.grad_clip);
  c.logstd_init = j.value("logstd_init", c.logstd_init);
  c.normalize_advantages = j.value("normalize_advantages", c.normalize_advantages);
  c.random_episode_start = j.value("random_episode_start", c.random_episode_start);
}

json sac_to_json(const SacConfig& c) {
  return json{{"hidden", c.hidden},
              {"activation", to_string(c.activation)},
              {"lr", c.lr},
              {"total_steps", c.total_steps},
              {"replay_capacity", c.replay_capacity},
              {"gamma", c.gamma},
              {"learning_starts", c.learning_starts},
              {"train_freq", c.train_freq},
              {"tau", c.tau},
              {"alpha", c.alpha},
              {"batch_size", c.batch_size},
              {"logstd_bias_init", c.logstd_bias_init},
              {"random_episode_start", c.random_episode_start}};
}

void sac_from_json(const json& j, SacConfig& c) {
  if (j.contains("hidden")) c.hidden = j.at("hidden").get<std::vector<int>>();
  if (j.contains("activation"))
    c.activation = activation_from_string(j.at("activation").get<std::string>());
  c.lr = j.value("lr", c.lr);
  c.total_steps = j.value("total_steps", c.total_steps);
  c.replay_capacity = j.value("replay_capacity", c.replay_capacity);
  c.gamma = j.value("gamma", c.gamma);
  c.learning_starts = j.value("learning_starts", c.learning_starts);
  c.train_freq = j.value("train_freq", c.train_freq);
  c.tau = j.value("tau", c.tau);
  c.alpha = j.value("alpha", c.alpha);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.logstd_bias_init = j.value("logstd_bias_init", c.logstd_bias_init);
  c.random_episode_start = j.value("random_episode_start", c.random_episode_start);
}

json ga_to_json(const GaConfig& c) {
  return json{{"population", c.population},       {"generations", c.generations},
              {"tournament", c.tournament},       {"crossover_prob", c.crossover_prob},
              {"mutation_prob", c.mutation_prob}, {"eta_c", c.eta_c},
              {"eta_m", c.eta_m},                 {"elitism", c.elitism}};
}

void ga_from_json(const json& j, GaConfig& c) {
  c.population = j.value("population", c.population);
  c.generations = j.value("generations", c.generations);
  c.tournament = j.value("tournament", c.tournament);
  c.crossover_prob = j.value("crossover_prob", c.crossover_prob);
  c.mutation_prob = j.value("mutation_prob", c.mutation_prob);
  c.eta_c = j.value("eta_c", c.eta_c);
  c.eta_m = j.value("eta_m", c.eta_m);
  c.elitism = j.value("elitism", c.elitism);
}

}  // namespace

std::string RunConfig::to_json_text() const {
  json j;
  j["plant"] = plant_to_json(plant);
  j["costs"] = costs_to_json(costs);
  j["tariff"] = tariff_to_json(tariff);
  j["bounds"] = bounds_to_json(bounds);
  j["step_mode"] = to_string(step_mode);
  j["ppo"] = ppo_to_json(ppo);
  j["sac"] = sac_to_json(sac);
  j["ga"] = ga_to_json(ga);
  j["deploy_steps_ppo"] = deploy_steps_ppo;
  j["deploy_steps_sac"] = deploy_steps_sac;
  j["scenario_seed_base"] = scenario_seed_base;
  return j.dump(2);
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  RunConfig rc;
  json j = json::parse(text);
  if (j.contains("plant")) plant_from_json(j.at("plant"), rc.plant);
  if (j.contains("costs")) costs_from_json(j.at("costs"), rc.costs);
  if (j.contains("tariff")) tariff_from_json(j.at("tariff"), rc.tariff);
  if (j.contains("bounds")) bounds_from_json(j.at("bounds"), rc.bounds);
  if (j.contains("step_mode"))
    rc.step_mode = step_mode_from_string(j.at("step_mode").get<std::string>());
  if (j.contains("ppo")) ppo_from_json(j.at("ppo"), rc.ppo);
  if (j.contains("sac")) sac_from_json(j.at("sac"), rc.sac);
  if (j.contains("ga")) ga_from_json(j.at("ga"), rc.ga);
  rc.deploy_steps_ppo = j.value("deploy_steps_ppo", rc.deploy_steps_ppo);
  rc.deploy_steps_sac = j.value("deploy_steps_sac", rc.deploy_steps_sac);
  rc.scenario_seed_base = j.value("scenario_seed_base", rc.scenario_seed_base);
  rc.validate();
  return rc;
}

void RunConfig::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << to_json_text();
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_json_text(ss.str());
}

EnvFactory make_training_env_factory(const RunConfig& rc, uint64_t seed) {
  const uint64_t base = seed ^ rc.scenario_seed_base;
  return [rc, base](int episode_index) {
    Scenario sc = make_training_scenario(derive_seed(base, episode_index), rc.bounds);
    return Env(std::move(sc), rc.plant, rc.costs, rc.tariff, rc.bounds, rc.step_mode);
  };
}

Env make_env_for_scenario(const RunConfig& rc, Scenario sc) {
  return Env(std::move(sc), rc.plant, rc.costs, rc.tariff, rc.bounds, rc.step_mode);
}

}  // namespace moldopt
