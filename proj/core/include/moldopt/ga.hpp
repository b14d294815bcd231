#pragma once

#include <array>
#include <functional>
#include <vector>

#include "moldopt/bounds.hpp"
#include "moldopt/economics.hpp"
#include "moldopt/plant.hpp"

namespace moldopt {

struct GaConfig {
  int population = 40;
  int generations = 25;
  int tournament = 3;
  double crossover_prob = 0.9;   // per pair
  double mutation_prob = 0.1;    // per gene
  double eta_c = 20.0;           // crossover distribution index
  double eta_m = 20.0;           // mutation distribution index
  int elitism = 1;
  void validate() const;
};

struct GaIndividual {
  std::array<double, 10> genes{};
  double fitness = 0;
};

struct GaHistoryRow {
  int generation = 0;  // 1-based
  double best = 0, mean = 0, stddev = 0;
  long evaluations = 0;  // cumulative
  double seconds = 0;    // elapsed since run start
};

struct GaResult {
  GaIndividual best;
  std::vector<GaHistoryRow> history;
  long evaluations = 0;
  double seconds = 0;
};

using FitnessFn = std::function<double(const ProcessParams&)>;

// the same per-10-minute profit objective the agents maximize, at frozen
// ambient conditions and tariff context
FitnessFn make_profit_fitness(EnvConditions e, Season season, TariffTier tier,
                              Bounds bounds = Bounds::defaults(), PlantConfig plant = PlantConfig{},
                              CostParams costs = CostParams{},
                              TariffSchedule tariff = TariffSchedule::defaults());

// bounded simulated binary crossover; children stay in bounds and preserve
// the per-gene parent mean before clipping
std::pair<std::array<double, 10>, std::array<double, 10>> sbx_crossover(
    const std::array<double, 10>& p1, const std::array<double, 10>& p2, double eta_c,
    const Bounds& b, Rng& rng);

// bounded polynomial mutation applied per gene with probability p_m
std::array<double, 10> polynomial_mutation(const std::array<double, 10>& genes, double eta_m,
                                           double p_m, const Bounds& b, Rng& rng);

// deterministic core of tournament selection: index of the fittest entrant
int ga_tournament(const std::vector<double>& fitness, const std::vector<int>& entrants);

GaResult run_ga(const FitnessFn& fitness, const Bounds& b, const GaConfig& cfg, uint64_t seed);

}  // namespace moldopt
