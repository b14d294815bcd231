#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "moldopt/checkpoint.hpp"
#include "moldopt/config.hpp"
#include "moldopt/ga.hpp"

namespace moldopt {

inline constexpr double kDaySeconds = 86400.0;

struct CycleRow {
  long index = 0;  // 1-based cycle number
  double start_seconds = 0;
  double t_machine = 0, h_machine = 0;
  TariffTier tier = TariffTier::OffPeak;
  double cycle_seconds = 0, p_max = 0, fill = 0;
  int good_count = 0;
  double profit = 0;
  double opt_seconds = 0;  // time spent choosing setpoints for this cycle
};

struct DayReport {
  std::string method;  // "ppo" | "sac" | "ga"
  Season season = Season::SpringFall;
  StepMode step_mode = StepMode::Large;
  int k_steps = 0;  // 0 for ga
  double total_profit = 0;
  long cycles = 0, cavities = 0, good = 0, defective = 0;
  double opt_seconds_total = 0;
  std::vector<CycleRow> rows;

  void save_csv(const std::string& path) const;
};

// k deterministic mean-action refinements at frozen ambient/tariff context
ProcessParams refine_k_steps(const GaussianPolicy& policy, ProcessParams start,
                             const EnvConditions& e, Season season, TariffTier tier, int k,
                             const Bounds& b, const StepSizes& steps, StepMode mode);

// 24-hour virtual production run: parameters start at the range midpoint,
// are refined k steps before every cycle (carrying across cycles), and a
// cycle is produced iff it starts before midnight
DayReport deploy_day(const Checkpoint& ck, Season season, int k_steps, const RunConfig& rc);

// same clock, but each cycle's setpoints come from a full GA run at the
// conditions read at cycle start
DayReport ga_deploy_day(Season season, const RunConfig& rc, uint64_t seed);

// the nine pinned initial setpoint cases for the fixed-condition study:
// six produce good parts at 14 degC / 45 %RH, three produce defects
std::array<ProcessParams, 9> compare_initial_cases();
EnvConditions compare_fixed_conditions();  // 14 degC / 45 %RH everywhere

// profit trajectory under deterministic refinement: rows = steps 0..k,
// cols = the nine cases
Eigen::MatrixXd fixed_condition_profit_matrix(const GaussianPolicy& policy, int k,
                                              const Bounds& b, StepMode mode,
                                              const RunConfig& rc);

struct TimingResult {
  double drl_seconds = 0;  // median per-decision k-step refinement
  double ga_seconds = 0;   // median full GA run
  double ratio = 0;        // ga / drl
};

TimingResult measure_decision_time(const GaussianPolicy& policy, int k, const RunConfig& rc,
                                   StepMode mode, int drl_reps = 51, int ga_reps = 5);

struct CompareResult {
  Eigen::MatrixXd ppo_profit, sac_profit;  // 11 x 9: refinement steps 0..10 per case
  std::vector<double> ga_best;             // best fitness per seed
  double ga_best_mean = 0, ga_best_std = 0;
  TimingResult timing_ppo, timing_sac;
  std::vector<DayReport> seasonal;  // ppo/sac/ga x spring,summer,winter
  bool ordering_ppo = false, ordering_sac = false, ordering_ga = false;  // spring>winter>summer
};

// full comparison protocol; writes CSV/JSON artifacts when out_dir is nonempty
CompareResult run_compare(const Checkpoint& ppo_ck, const Checkpoint& sac_ck, const RunConfig& rc,
                          const std::string& out_dir);

struct StepsizeResult {
  // per agent, reports for {large,k}, {small,k}, {small,2k} across 3 seasons
  std::vector<DayReport> reports;
  double ppo_small_k_seconds = 0, ppo_small_2k_seconds = 0;
  double sac_small_k_seconds = 0, sac_small_2k_seconds = 0;
  bool ppo_small_k_underperforms = false;  // vs {large,k} on summed profit
  bool sac_small_k_underperforms = false;
};

StepsizeResult run_stepsize_study(const Checkpoint& ppo_large, const Checkpoint& ppo_small,
                                  const Checkpoint& sac_large, const Checkpoint& sac_small,
                                  const RunConfig& rc, const std::string& out_dir);

}  // namespace moldopt
