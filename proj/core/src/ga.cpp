#include "moldopt/ga.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace moldopt {

void GaConfig::validate() const {
  if (population < 2 || population % 2 != 0)
    throw std::invalid_argument("ga: population must be even and >= 2");
  if (generations <= 0) throw std::invalid_argument("ga: generations must be positive");
  if (tournament < 1 || tournament > population) throw std::invalid_argument("ga: bad tournament");
  if (crossover_prob < 0 || crossover_prob > 1 || mutation_prob < 0 || mutation_prob > 1)
    throw std::invalid_argument("ga: probabilities must be in [0,1]");
  if (eta_c <= 0 || eta_m <= 0) throw std::invalid_argument("ga: distribution indices positive");
  if (elitism < 0 || elitism >= population) throw std::invalid_argument("ga: bad elitism");
}

FitnessFn make_profit_fitness(EnvConditions e, Season season, TariffTier tier, Bounds bounds,
                              PlantConfig plant, CostParams costs, TariffSchedule tariff) {
  const double price = tariff.unit_price(season, tier);
  return [=](const ProcessParams& p) {
    PlantOutcome out = simulate_cycle(p, e, bounds, plant);
    return interval_reward(out, price, costs);
  };
}

std::pair<std::array<double, 10>, std::array<double, 10>> sbx_crossover(
    const std::array<double, 10>& p1, const std::array<double, 10>& p2, double eta_c,
    const Bounds& b, Rng& rng) {
  std::array<double, 10> c1 = p1, c2 = p2;
  for (int g = 0; g < 10; ++g) {
    const double u = rng.uniform01();
    const double beta = u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta_c + 1.0))
                                 : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta_c + 1.0));
    c1[g] = 0.5 * ((1.0 + beta) * p1[g] + (1.0 - beta) * p2[g]);
    c2[g] = 0.5 * ((1.0 - beta) * p1[g] + (1.0 + beta) * p2[g]);
    c1[g] = clip(c1[g], b.param_lo[g], b.param_hi[g]);
    c2[g] = clip(c2[g], b.param_lo[g], b.param_hi[g]);
  }
  return {c1, c2};
}

std::array<double, 10> polynomial_mutation(const std::array<double, 10>& genes, double eta_m,
                                           double p_m, const Bounds& b, Rng& rng) {
  std::array<double, 10> out = genes;
  for (int g = 0; g < 10; ++g) {
    if (rng.uniform01() >= p_m) continue;
    const double lo = b.param_lo[g], hi = b.param_hi[g];
    const double range = hi - lo;
    const double u = rng.uniform01();
    const double d1 = (out[g] - lo) / range;  // headroom below
    const double d2 = (hi - out[g]) / range;  // headroom above
    double dq;
    if (u < 0.5) {
      const double bl = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta_m + 1.0);
      dq = std::pow(bl, 1.0 / (eta_m + 1.0)) - 1.0;
    } else {
      const double bl = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta_m + 1.0);
      dq = 1.0 - std::pow(bl, 1.0 / (eta_m + 1.0));
    }
    out[g] = clip(out[g] + dq * range, lo, hi);
  }
  return out;
}

int ga_tournament(const std::vector<double>& fitness, const std::vector<int>& entrants) {
  if (entrants.empty()) throw std::invalid_argument("tournament: no entrants");
  int best = entrants[0];
  for (int e : entrants)
    if (fitness[e] > fitness[best]) best = e;
  return best;
}

GaResult run_ga(const FitnessFn& fitness, const Bounds& b, const GaConfig& cfg, uint64_t seed) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed);
  long evals = 0;
  GaIndividual best_ever;
  bool have_best = false;
  auto eval = [&](const std::array<double, 10>& genes) {
    ++evals;
    const double f = fitness(ProcessParams::from_array(genes));
    if (!have_best || f > best_ever.fitness) {
      best_ever = {genes, f};
      have_best = true;
    }
    return f;
  };

  std::vector<GaIndividual> pop(cfg.population);
  std::vector<double> fit(cfg.population);
  for (int i = 0; i < cfg.population; ++i) {
    for (int g = 0; g < 10; ++g) pop[i].genes[g] = rng.uniform(b.param_lo[g], b.param_hi[g]);
    pop[i].fitness = fit[i] = eval(pop[i].genes);
  }

  auto select = [&]() -> const GaIndividual& {
    std::vector<int> entrants(cfg.tournament);
    for (int k = 0; k < cfg.tournament; ++k)
      entrants[k] = static_cast<int>(rng.uniform_int(cfg.population));
    return pop[ga_tournament(fit, entrants)];
  };

  GaResult out;
  for (int gen = 1; gen <= cfg.generations; ++gen) {
    std::vector<GaIndividual> next;
    next.reserve(cfg.population);
    // carry the elites with cached fitness (deterministic objective)
    std::vector<int> rank(cfg.population);
    for (int i = 0; i < cfg.population; ++i) rank[i] = i;
    std::sort(rank.begin(), rank.end(),
              [&](int a, int c) { return pop[a].fitness > pop[c].fitness; });
    for (int e = 0; e < cfg.elitism; ++e) next.push_back(pop[rank[e]]);

    while (static_cast<int>(next.size()) < cfg.population) {
      const GaIndividual& pa = select();
      const GaIndividual& pb = select();
      std::array<double, 10> ca = pa.genes, cb = pb.genes;
      if (rng.uniform01() < cfg.crossover_prob)
        std::tie(ca, cb) = sbx_crossover(pa.genes, pb.genes, cfg.eta_c, b, rng);
      for (auto* child : {&ca, &cb}) {
        if (static_cast<int>(next.size()) >= cfg.population) break;
        GaIndividual ind;
        ind.genes = polynomial_mutation(*child, cfg.eta_m, cfg.mutation_prob, b, rng);
        ind.fitness = eval(ind.genes);
        next.push_back(ind);
      }
    }
    pop = std::move(next);
    for (int i = 0; i < cfg.population; ++i) fit[i] = pop[i].fitness;

    double best = pop[0].fitness, mean = 0;
    for (const auto& ind : pop) {
      best = std::max(best, ind.fitness);
      mean += ind.fitness;
    }
    mean /= cfg.population;
    double var = 0;
    for (const auto& ind : pop) var += (ind.fitness - mean) * (ind.fitness - mean);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.history.push_back({gen, best, mean, std::sqrt(var / cfg.population), evals, sec});
  }

  out.best = best_ever;
  out.evaluations = evals;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace moldopt
