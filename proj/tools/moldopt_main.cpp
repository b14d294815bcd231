#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "moldopt/checkpoint.hpp"
#include "moldopt/config.hpp"
#include "moldopt/deploy.hpp"

using namespace moldopt;
namespace fs = std::filesystem;

namespace {

// precedence: explicit flag, then MOLDOPT_OUT, then the working directory
std::string resolve_out(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MOLDOPT_OUT")) return env;
  return ".";
}

RunConfig load_config(const std::string& path) {
  if (path.empty()) return RunConfig{};
  return RunConfig::load(path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << text;
}

Checkpoint make_checkpoint(const std::string& algo, const RunConfig& rc, uint64_t seed,
                           const GaussianPolicy& policy) {
  Checkpoint ck;
  ck.algo = algo;
  ck.step_mode = rc.step_mode;
  ck.seed = seed;
  ck.bounds = rc.bounds;
  ck.one_hot_order = Checkpoint::canonical_one_hot_order();
  ck.config_json = rc.to_json_text();
  ck.policy = policy;
  return ck;
}

int cmd_train(const std::string& algo, const std::string& config_path, uint64_t seed,
              const std::string& out_flag, long steps_override,
              const std::string& step_mode_override) {
  RunConfig rc = load_config(config_path);
  if (!step_mode_override.empty()) rc.step_mode = step_mode_from_string(step_mode_override);
  if (steps_override > 0) {
    rc.ppo.total_steps = steps_override;
    rc.sac.total_steps = steps_override;
  }
  rc.validate();

  const std::string out = resolve_out(out_flag);
  fs::create_directories(out);
  EnvFactory make_env = make_training_env_factory(rc, seed);

  nlohmann::json summary;
  summary["algorithm"] = algo;
  summary["seed"] = seed;
  summary["step_mode"] = to_string(rc.step_mode);

  if (algo == "ppo") {
    PpoTrainResult res = train_ppo(make_env, rc.ppo, seed);
    res.log.save_csv(out + "/train_log.csv");
    Checkpoint ck = make_checkpoint("ppo", rc, seed, res.policy);
    ck.extra_names = {"value"};
    ck.extra_nets = {res.value};
    ck.save(out + "/checkpoint.json");
    summary["steps"] = res.steps;
    summary["episodes"] = res.episodes;
    summary["seconds"] = res.seconds;
  } else {
    SacTrainResult res = train_sac(make_env, rc.sac, seed);
    res.log.save_csv(out + "/train_log.csv");
    Checkpoint ck = make_checkpoint("sac", rc, seed, res.agent.actor);
    ck.extra_names = {"q1", "q2"};
    ck.extra_nets = {res.agent.q1, res.agent.q2};
    ck.save(out + "/checkpoint.json");
    summary["steps"] = res.steps;
    summary["episodes"] = res.episodes;
    summary["updates"] = res.updates;
    summary["seconds"] = res.seconds;
  }
  write_text(out + "/config.json", rc.to_json_text());
  write_text(out + "/summary.json", summary.dump(2));
  std::cout << "trained " << algo << " seed " << seed << " -> " << out << "\n";
  return 0;
}

int cmd_deploy(const std::string& ck_path, const std::string& season_name, int k_steps,
               const std::string& config_path, const std::string& out_flag) {
  Checkpoint ck = Checkpoint::load(ck_path);
  RunConfig rc = load_config(config_path);
  const Season season = season_from_string(season_name);
  DayReport rep = deploy_day(ck, season, k_steps, rc);

  const std::string out = resolve_out(out_flag);
  fs::create_directories(out);
  const std::string tag = rep.method + "_" + to_string(season);
  rep.save_csv(out + "/deploy_" + tag + ".csv");
  nlohmann::json j;
  j["method"] = rep.method;
  j["season"] = to_string(rep.season);
  j["step_mode"] = to_string(rep.step_mode);
  j["k_steps"] = rep.k_steps;
  j["total_profit"] = rep.total_profit;
  j["cycles"] = rep.cycles;
  j["cavities"] = rep.cavities;
  j["good"] = rep.good;
  j["defective"] = rep.defective;
  j["opt_seconds_total"] = rep.opt_seconds_total;
  write_text(out + "/deploy_" + tag + ".json", j.dump(2));
  std::cout << tag << ": profit " << rep.total_profit << " over " << rep.cycles << " cycles\n";
  return 0;
}

int cmd_ga(double temp, double humidity, const std::string& season_name,
           const std::string& tier_name, uint64_t seed, const std::string& config_path,
           const std::string& out_flag) {
  RunConfig rc = load_config(config_path);
  const Season season = season_from_string(season_name);
  const TariffTier tier = tier_from_string(tier_name);
  const EnvConditions e{temp, temp, humidity, humidity};
  if (!rc.bounds.contains(e)) throw std::runtime_error("conditions outside the modeled ranges");

  FitnessFn f = make_profit_fitness(e, season, tier, rc.bounds, rc.plant, rc.costs, rc.tariff);
  GaResult res = run_ga(f, rc.bounds, rc.ga, seed);

  const std::string out = resolve_out(out_flag);
  fs::create_directories(out);
  std::vector<std::vector<double>> rows;
  for (const GaHistoryRow& h : res.history)
    rows.push_back({static_cast<double>(h.generation), h.best, h.mean, h.stddev,
                    static_cast<double>(h.evaluations), h.seconds});
  write_csv(out + "/ga_history.csv",
            {"generation", "best", "mean", "stddev", "evaluations", "seconds"}, rows);
  nlohmann::json j;
  j["best_fitness"] = res.best.fitness;
  j["best_genes"] = res.best.genes;
  j["evaluations"] = res.evaluations;
  j["seconds"] = res.seconds;
  j["season"] = to_string(season);
  j["tier"] = to_string(tier);
  j["temp_c"] = temp;
  j["humidity_pct"] = humidity;
  write_text(out + "/ga_best.json", j.dump(2));
  std::cout << "ga best " << res.best.fitness << " after " << res.evaluations
            << " evaluations\n";
  return 0;
}

int cmd_compare(const std::string& ppo_path, const std::string& sac_path,
                const std::string& config_path, const std::string& out_flag) {
  Checkpoint ppo_ck = Checkpoint::load(ppo_path);
  Checkpoint sac_ck = Checkpoint::load(sac_path);
  RunConfig rc = load_config(config_path);
  const std::string out = resolve_out(out_flag);
  CompareResult res = run_compare(ppo_ck, sac_ck, rc, out);
  std::cout << "ga best mean " << res.ga_best_mean << " (sd " << res.ga_best_std << ")\n"
            << "timing ratio ga/drl: ppo " << res.timing_ppo.ratio << ", sac "
            << res.timing_sac.ratio << "\n"
            << "seasonal ordering spring>winter>summer: ppo " << res.ordering_ppo << ", sac "
            << res.ordering_sac << ", ga " << res.ordering_ga << "\n";
  return 0;
}

int cmd_stepsize(const std::string& ppo_large, const std::string& ppo_small,
                 const std::string& sac_large, const std::string& sac_small,
                 const std::string& config_path, const std::string& out_flag) {
  RunConfig rc = load_config(config_path);
  const std::string out = resolve_out(out_flag);
  StepsizeResult res =
      run_stepsize_study(Checkpoint::load(ppo_large), Checkpoint::load(ppo_small),
                         Checkpoint::load(sac_large), Checkpoint::load(sac_small), rc, out);
  std::cout << "ppo small-step seconds: k " << res.ppo_small_k_seconds << ", 2k "
            << res.ppo_small_2k_seconds << "\n"
            << "sac small-step seconds: k " << res.sac_small_k_seconds << ", 2k "
            << res.sac_small_2k_seconds << "\n";
  return 0;
}

int cmd_scenario_gen(const std::string& kind, uint64_t seed, const std::string& season_name,
                     const std::string& out_path) {
  Scenario sc;
  if (kind == "training") {
    sc = make_training_scenario(seed);
  } else if (kind == "seasonal") {
    sc = make_seasonal_scenario(season_from_string(season_name));
  } else {
    throw std::runtime_error("unknown scenario kind: " + kind);
  }
  sc.save(out_path);
  std::cout << "wrote " << kind << " scenario with " << sc.steps.size() << " steps to "
            << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"profit-driven process-parameter optimization for injection molding"};
  app.require_subcommand(1);

  std::string algo, config_path, out_flag, step_mode_override;
  uint64_t seed = 0;
  long steps_override = 0;
  auto* train = app.add_subcommand("train", "train an agent and write a checkpoint");
  train->add_option("--algo", algo, "ppo | sac")
      ->required()
      ->check(CLI::IsMember({"ppo", "sac"}));
  train->add_option("--config", config_path, "run configuration JSON");
  train->add_option("--seed", seed, "training seed")->required();
  train->add_option("--out", out_flag, "output directory");
  train->add_option("--steps", steps_override, "override total environment steps");
  train->add_option("--step-mode", step_mode_override, "small | large")
      ->check(CLI::IsMember({"small", "large"}));

  std::string ck_path, season_name = "springfall";
  int k_steps = 0;
  auto* deploy = app.add_subcommand("deploy", "24-hour deployment of a trained policy");
  deploy->add_option("--checkpoint", ck_path, "checkpoint JSON")->required();
  deploy->add_option("--season", season_name, "spring | summer | winter")->required();
  deploy->add_option("--steps", k_steps, "policy refinements per cycle (0 = per-agent default)");
  deploy->add_option("--config", config_path, "run configuration JSON");
  deploy->add_option("--out", out_flag, "output directory");

  double temp = 14.0, humidity = 45.0;
  std::string tier_name = "offpeak";
  auto* ga = app.add_subcommand("ga", "evolutionary search at fixed conditions");
  ga->add_option("--temp", temp, "machine/factory temperature, degC")->required();
  ga->add_option("--humidity", humidity, "machine/factory relative humidity, %")->required();
  ga->add_option("--season", season_name, "tariff season")->required();
  ga->add_option("--tier", tier_name, "offpeak | midpeak | onpeak")->required();
  ga->add_option("--seed", seed, "search seed")->required();
  ga->add_option("--config", config_path, "run configuration JSON");
  ga->add_option("--out", out_flag, "output directory");

  std::string ppo_path, sac_path;
  auto* compare = app.add_subcommand("compare", "multi-start, timing and seasonal comparison");
  compare->add_option("--ppo", ppo_path, "ppo checkpoint")->required();
  compare->add_option("--sac", sac_path, "sac checkpoint")->required();
  compare->add_option("--config", config_path, "run configuration JSON");
  compare->add_option("--out", out_flag, "output directory");

  std::string ppo_large, ppo_small, sac_large, sac_small;
  auto* stepsize = app.add_subcommand("stepsize-study", "step-size ablation across seasons");
  stepsize->add_option("--ppo-large", ppo_large, "ppo checkpoint, large steps")->required();
  stepsize->add_option("--ppo-small", ppo_small, "ppo checkpoint, small steps")->required();
  stepsize->add_option("--sac-large", sac_large, "sac checkpoint, large steps")->required();
  stepsize->add_option("--sac-small", sac_small, "sac checkpoint, small steps")->required();
  stepsize->add_option("--config", config_path, "run configuration JSON");
  stepsize->add_option("--out", out_flag, "output directory");

  std::string kind, scenario_out = "scenario.json";
  auto* scenario = app.add_subcommand("scenario", "scenario utilities");
  auto* gen = scenario->add_subcommand("gen", "generate and save a scenario");
  gen->add_option("--kind", kind, "training | seasonal")
      ->required()
      ->check(CLI::IsMember({"training", "seasonal"}));
  gen->add_option("--seed", seed, "scenario seed (training kind)");
  gen->add_option("--season", season_name, "season (seasonal kind)");
  gen->add_option("--out", scenario_out, "output file");
  scenario->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(algo, config_path, seed, out_flag, steps_override,
                                 step_mode_override);
    if (*deploy) return cmd_deploy(ck_path, season_name, k_steps, config_path, out_flag);
    if (*ga) return cmd_ga(temp, humidity, season_name, tier_name, seed, config_path, out_flag);
    if (*compare) return cmd_compare(ppo_path, sac_path, config_path, out_flag);
    if (*stepsize)
      return cmd_stepsize(ppo_large, ppo_small, sac_large, sac_small, config_path, out_flag);
    if (*scenario) return cmd_scenario_gen(kind, seed, season_name, scenario_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
