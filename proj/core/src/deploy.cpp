#include "moldopt/deploy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace moldopt {

using Eigen::MatrixXd;
namespace fs = std::filesystem;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

int minute_of_day(double t_seconds) {
  int m = static_cast<int>(t_seconds / 60.0);
  return ((m % 1440) + 1440) % 1440;
}

Eigen::RowVectorXd state_row(const ProcessParams& p, const EnvConditions& e, Season s,
                             TariffTier tier, const Bounds& b) {
  State st = build_state(p, e, s, tier, b);
  return Eigen::Map<const Eigen::RowVectorXd>(st.data(), kObsDim);
}

}  // namespace

void DayReport::save_csv(const std::string& path) const {
  std::vector<std::vector<double>> data;
  data.reserve(rows.size());
  for (const CycleRow& r : rows)
    data.push_back({static_cast<double>(r.index), r.start_seconds, r.t_machine, r.h_machine,
                    static_cast<double>(static_cast<int>(r.tier)), r.cycle_seconds, r.p_max,
                    r.fill, static_cast<double>(r.good_count), r.profit, r.opt_seconds});
  write_csv(path,
            {"cycle", "start_s", "t_machine", "h_machine", "tier", "cycle_s", "p_max", "fill",
             "good", "profit", "opt_s"},
            data);
}

ProcessParams refine_k_steps(const GaussianPolicy& policy, ProcessParams start,
                             const EnvConditions& e, Season season, TariffTier tier, int k,
                             const Bounds& b, const StepSizes& steps, StepMode mode) {
  ProcessParams p = start;
  for (int i = 0; i < k; ++i) {
    Eigen::MatrixXd a = policy_mean_action(policy, state_row(p, e, season, tier, b));
    Action act{};
    for (int j = 0; j < kActDim; ++j) act[j] = a(0, j);
    p = apply_action(p, act, steps, mode, b);
  }
  return p;
}

namespace {

template <typename ChooseParams>
DayReport run_day(const std::string& method, Season season, StepMode mode, int k,
                  const RunConfig& rc, const Bounds& bounds, ChooseParams&& choose) {
  DayReport rep;
  rep.method = method;
  rep.season = season;
  rep.step_mode = mode;
  rep.k_steps = k;

  ProcessParams params = bounds.midpoint();
  double t = 0;
  long i = 0;
  while (t < kDaySeconds) {
    const EnvConditions e = seasonal_env(season, t);
    const TariffTier tier = rc.tariff.classify(season, minute_of_day(t));

    const double t0 = now_seconds();
    params = choose(params, e, tier);
    const double opt_s = now_seconds() - t0;

    const PlantOutcome out = simulate_cycle(params, e, bounds, rc.plant);
    const double price = rc.tariff.unit_price(season, tier);
    const double profit = cycle_profit(out.good, out.p_max, price, rc.costs);

    ++i;
    rep.rows.push_back({i, t, e.t_machine, e.h_machine, tier, out.cycle_seconds, out.p_max,
                        out.fill, out.good_count, profit, opt_s});
    rep.total_profit += profit;
    rep.cycles += 1;
    rep.good += out.good_count;
    rep.defective += kCavities - out.good_count;
    rep.opt_seconds_total += opt_s;
    t += out.cycle_seconds;
  }
  rep.cavities = kCavities * rep.cycles;
  return rep;
}

}  // namespace

DayReport deploy_day(const Checkpoint& ck, Season season, int k_steps, const RunConfig& rc) {
  ck.validate();
  const int k = k_steps > 0 ? k_steps
                            : (ck.algo == "sac" ? rc.deploy_steps_sac : rc.deploy_steps_ppo);
  const StepSizes steps = StepSizes::from(ck.bounds);
  return run_day(ck.algo, season, ck.step_mode, k, rc, ck.bounds,
                 [&](const ProcessParams& p, const EnvConditions& e, TariffTier tier) {
                   return refine_k_steps(ck.policy, p, e, season, tier, k, ck.bounds, steps,
                                         ck.step_mode);
                 });
}

DayReport ga_deploy_day(Season season, const RunConfig& rc, uint64_t seed) {
  long cycle = 0;
  return run_day("ga", season, rc.step_mode, 0, rc, rc.bounds,
                 [&](const ProcessParams&, const EnvConditions& e, TariffTier tier) {
                   FitnessFn f =
                       make_profit_fitness(e, season, tier, rc.bounds, rc.plant, rc.costs,
                                           rc.tariff);
                   GaResult res = run_ga(f, rc.bounds, rc.ga, derive_seed(seed, cycle++));
                   return ProcessParams::from_array(res.best.genes);
                 });
}

std::array<ProcessParams, 9> compare_initial_cases() {
  auto mk = [](double v1, double v2, double v3, double p1, double p2, double p3, double x1,
               double x2, double x3, double h) {
    return ProcessParams{v1, v2, v3, p1, p2, p3, x1, x2, x3, h};
  };
  return {
      // producing good parts at 14 degC / 45 %RH
      mk(30, 30, 20, 130, 130, 140, 46, 38, 30, 1.2),  // nominal
      mk(40, 40, 30, 120, 120, 130, 44, 32, 28, 0.0),  // fast and cold
      mk(35, 35, 25, 135, 135, 145, 47, 42, 31, 1.8),  // upper-mid drive
      mk(20, 20, 10, 140, 140, 150, 48, 44, 32, 2.4),  // slow, pressure-driven
      mk(32, 28, 22, 128, 132, 138, 46, 40, 29, 0.9),  // mixed mid
      mk(38, 26, 24, 122, 138, 144, 45, 34, 31, 0.3),  // uneven profile
      // producing defects at 14 degC / 45 %RH
      mk(25, 25, 15, 125, 125, 135, 45, 36, 29, 0.6),  // short shot
      mk(40, 40, 30, 140, 140, 150, 44, 32, 28, 2.4),  // flash
      mk(20, 20, 10, 120, 120, 130, 48, 44, 32, 0.0),  // severe short shot
  };
}

EnvConditions compare_fixed_conditions() { return {14.0, 14.0, 45.0, 45.0}; }

MatrixXd fixed_condition_profit_matrix(const GaussianPolicy& policy, int k, const Bounds& b,
                                       StepMode mode, const RunConfig& rc) {
  const EnvConditions e = compare_fixed_conditions();
  const Season season = Season::SpringFall;
  const TariffTier tier = TariffTier::OffPeak;
  const double price = rc.tariff.unit_price(season, tier);
  const StepSizes steps = StepSizes::from(b);
  const auto cases = compare_initial_cases();

  MatrixXd m(k + 1, cases.size());
  for (int c = 0; c < static_cast<int>(cases.size()); ++c) {
    ProcessParams p = cases[c];
    for (int step = 0; step <= k; ++step) {
      if (step > 0) p = refine_k_steps(policy, p, e, season, tier, 1, b, steps, mode);
      const PlantOutcome out = simulate_cycle(p, e, b, rc.plant);
      m(step, c) = interval_reward(out, price, rc.costs);
    }
  }
  return m;
}

TimingResult measure_decision_time(const GaussianPolicy& policy, int k, const RunConfig& rc,
                                   StepMode mode, int drl_reps, int ga_reps) {
  const EnvConditions e = compare_fixed_conditions();
  const StepSizes steps = StepSizes::from(rc.bounds);
  const ProcessParams start = rc.bounds.midpoint();

  std::vector<double> drl_times(drl_reps);
  volatile double sink = 0;
  for (int r = 0; r < drl_reps; ++r) {
    const double t0 = now_seconds();
    ProcessParams p = refine_k_steps(policy, start, e, Season::SpringFall, TariffTier::OffPeak, k,
                                     rc.bounds, steps, mode);
    drl_times[r] = now_seconds() - t0;
    sink = sink + p.v1;
  }
  FitnessFn f = make_profit_fitness(e, Season::SpringFall, TariffTier::OffPeak, rc.bounds,
                                    rc.plant, rc.costs, rc.tariff);
  std::vector<double> ga_times(ga_reps);
  for (int r = 0; r < ga_reps; ++r) {
    const double t0 = now_seconds();
    GaResult res = run_ga(f, rc.bounds, rc.ga, 1000 + r);
    ga_times[r] = now_seconds() - t0;
    sink = sink + res.best.fitness;
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  TimingResult t;
  t.drl_seconds = median(drl_times);
  t.ga_seconds = median(ga_times);
  t.ratio = t.drl_seconds > 0 ? t.ga_seconds / t.drl_seconds : 0;
  return t;
}

namespace {

void save_profit_matrix(const std::string& path, const MatrixXd& m) {
  std::vector<std::string> header = {"step"};
  for (int c = 0; c < m.cols(); ++c) header.push_back("case" + std::to_string(c + 1));
  std::vector<std::vector<double>> rows;
  for (int r = 0; r < m.rows(); ++r) {
    std::vector<double> row = {static_cast<double>(r)};
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  write_csv(path, header, rows);
}

bool profit_ordering(const std::vector<DayReport>& reports, const std::string& method) {
  double spring = 0, summer = 0, winter = 0;
  for (const DayReport& r : reports) {
    if (r.method != method) continue;
    if (r.season == Season::SpringFall) spring = r.total_profit;
    if (r.season == Season::Summer) summer = r.total_profit;
    if (r.season == Season::Winter) winter = r.total_profit;
  }
  return spring > winter && winter > summer;
}

}  // namespace

CompareResult run_compare(const Checkpoint& ppo_ck, const Checkpoint& sac_ck, const RunConfig& rc,
                          const std::string& out_dir) {
  if (ppo_ck.algo != "ppo")
    throw CheckpointError(CheckpointError::Kind::Algo, "first checkpoint must be ppo");
  if (sac_ck.algo != "sac")
    throw CheckpointError(CheckpointError::Kind::Algo, "second checkpoint must be sac");

  CompareResult out;
  const int kp = rc.deploy_steps_ppo, ks = rc.deploy_steps_sac;
  // Profit tables always cover refinement steps 0..10 so the two agents line up row for row.
  constexpr int kTableSteps = 10;
  out.ppo_profit = fixed_condition_profit_matrix(ppo_ck.policy, kTableSteps, ppo_ck.bounds,
                                                 ppo_ck.step_mode, rc);
  out.sac_profit = fixed_condition_profit_matrix(sac_ck.policy, kTableSteps, sac_ck.bounds,
                                                 sac_ck.step_mode, rc);

  const EnvConditions e = compare_fixed_conditions();
  FitnessFn f = make_profit_fitness(e, Season::SpringFall, TariffTier::OffPeak, rc.bounds,
                                    rc.plant, rc.costs, rc.tariff);
  std::vector<std::vector<double>> ga_rows;
  for (uint64_t seed = 1; seed <= 9; ++seed) {
    GaResult res = run_ga(f, rc.bounds, rc.ga, seed);
    out.ga_best.push_back(res.best.fitness);
    ga_rows.push_back({static_cast<double>(seed), res.best.fitness,
                       static_cast<double>(res.evaluations), res.seconds});
  }
  for (double v : out.ga_best) out.ga_best_mean += v;
  out.ga_best_mean /= out.ga_best.size();
  for (double v : out.ga_best)
    out.ga_best_std += (v - out.ga_best_mean) * (v - out.ga_best_mean);
  out.ga_best_std = std::sqrt(out.ga_best_std / out.ga_best.size());

  out.timing_ppo = measure_decision_time(ppo_ck.policy, kp, rc, ppo_ck.step_mode);
  out.timing_sac = measure_decision_time(sac_ck.policy, ks, rc, sac_ck.step_mode);

  for (Season s : {Season::SpringFall, Season::Summer, Season::Winter}) {
    out.seasonal.push_back(deploy_day(ppo_ck, s, kp, rc));
    out.seasonal.push_back(deploy_day(sac_ck, s, ks, rc));
    out.seasonal.push_back(ga_deploy_day(s, rc, 7));
  }
  out.ordering_ppo = profit_ordering(out.seasonal, "ppo");
  out.ordering_sac = profit_ordering(out.seasonal, "sac");
  out.ordering_ga = profit_ordering(out.seasonal, "ga");

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    save_profit_matrix(out_dir + "/fixed_profit_ppo.csv", out.ppo_profit);
    save_profit_matrix(out_dir + "/fixed_profit_sac.csv", out.sac_profit);
    write_csv(out_dir + "/ga_fixed_runs.csv", {"seed", "best_fitness", "evaluations", "seconds"},
              ga_rows);
    std::vector<std::vector<double>> seasonal_rows;
    for (const DayReport& r : out.seasonal) {
      r.save_csv(out_dir + "/deploy_" + r.method + "_" + to_string(r.season) + ".csv");
      seasonal_rows.push_back({static_cast<double>(r.method == "ppo"   ? 0
                                                   : r.method == "sac" ? 1
                                                                       : 2),
                               static_cast<double>(static_cast<int>(r.season)), r.total_profit,
                               static_cast<double>(r.cycles), static_cast<double>(r.cavities),
                               static_cast<double>(r.good), static_cast<double>(r.defective),
                               r.opt_seconds_total});
    }
    write_csv(out_dir + "/seasonal_summary.csv",
              {"method", "season", "profit", "cycles", "cavities", "good", "defective", "opt_s"},
              seasonal_rows);
    nlohmann::json j;
    j["ga_best_mean"] = out.ga_best_mean;
    j["ga_best_std"] = out.ga_best_std;
    j["timing"] = {{"ppo", {{"drl_s", out.timing_ppo.drl_seconds},
                            {"ga_s", out.timing_ppo.ga_seconds},
                            {"ratio", out.timing_ppo.ratio}}},
                   {"sac", {{"drl_s", out.timing_sac.drl_seconds},
                            {"ga_s", out.timing_sac.ga_seconds},
                            {"ratio", out.timing_sac.ratio}}}};
    j["seasonal_ordering_spring_winter_summer"] = {{"ppo", out.ordering_ppo},
                                                   {"sac", out.ordering_sac},
                                                   {"ga", out.ordering_ga}};
    std::ofstream(out_dir + "/compare_summary.json") << j.dump(2);
  }
  return out;
}

StepsizeResult run_stepsize_study(const Checkpoint& ppo_large, const Checkpoint& ppo_small,
                                  const Checkpoint& sac_large, const Checkpoint& sac_small,
                                  const RunConfig& rc, const std::string& out_dir) {
  struct Arm {
    const Checkpoint* ck;
    int k;
    const char* label;
  };
  const int kp = rc.deploy_steps_ppo, ks = rc.deploy_steps_sac;
  std::vector<std::pair<std::string, std::vector<Arm>>> agents = {
      {"ppo",
       {{&ppo_large, kp, "large_k"}, {&ppo_small, kp, "small_k"}, {&ppo_small, 2 * kp,
                                                                   "small_2k"}}},
      {"sac",
       {{&sac_large, ks, "large_k"}, {&sac_small, ks, "small_k"}, {&sac_small, 2 * ks,
                                                                   "small_2k"}}}};

  StepsizeResult out;
  std::vector<std::vector<double>> rows;
  for (auto& [agent, arms] : agents) {
    double profit_large = 0, profit_small = 0, t_small_k = 0, t_small_2k = 0;
    for (const Arm& arm : arms) {
      for (Season s : {Season::SpringFall, Season::Summer, Season::Winter}) {
        DayReport rep = deploy_day(*arm.ck, s, arm.k, rc);
        if (std::string(arm.label) == "large_k") profit_large += rep.total_profit;
        if (std::string(arm.label) == "small_k") {
          profit_small += rep.total_profit;
          t_small_k += rep.opt_seconds_total;
        }
        if (std::string(arm.label) == "small_2k") t_small_2k += rep.opt_seconds_total;
        rows.push_back({static_cast<double>(agent == "sac"),
                        static_cast<double>(arm.ck->step_mode == StepMode::Small),
                        static_cast<double>(arm.k), static_cast<double>(static_cast<int>(s)),
                        rep.total_profit, static_cast<double>(rep.cycles),
                        static_cast<double>(rep.cavities), static_cast<double>(rep.good),
                        static_cast<double>(rep.defective), rep.opt_seconds_total});
        out.reports.push_back(std::move(rep));
      }
    }
    if (agent == "ppo") {
      out.ppo_small_k_seconds = t_small_k;
      out.ppo_small_2k_seconds = t_small_2k;
      out.ppo_small_k_underperforms = profit_small < profit_large;
    } else {
      out.sac_small_k_seconds = t_small_k;
      out.sac_small_2k_seconds = t_small_2k;
      out.sac_small_k_underperforms = profit_small < profit_large;
    }
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_csv(out_dir + "/stepsize_reports.csv",
              {"agent_sac", "small_mode", "k", "season", "profit", "cycles", "cavities", "good",
               "defective", "opt_s"},
              rows);
    nlohmann::json j;
    j["ppo"] = {{"small_k_seconds", out.ppo_small_k_seconds},
                {"small_2k_seconds", out.ppo_small_2k_seconds},
                {"small_k_underperforms_large", out.ppo_small_k_underperforms}};
    j["sac"] = {{"small_k_seconds", out.sac_small_k_seconds},
                {"small_2k_seconds", out.sac_small_2k_seconds},
                {"small_k_underperforms_large", out.sac_small_k_underperforms}};
    std::ofstream(out_dir + "/stepsize_summary.json") << j.dump(2);
  }
  return out;
}

}  // namespace moldopt
