#include <benchmark/benchmark.h>

#include "moldopt/config.hpp"
#include "moldopt/deploy.hpp"

using namespace moldopt;

namespace {

GaussianPolicy full_policy() {
  Rng rng(1);
  return make_state_logstd_policy(kObsDim, kActDim, {256, 256}, Activation::Tanh, rng, -0.5);
}

void BM_SimulateCycle(benchmark::State& state) {
  const Bounds b = Bounds::defaults();
  const ProcessParams p = b.midpoint();
  const EnvConditions e{14, 14, 45, 45};
  for (auto _ : state) benchmark::DoNotOptimize(simulate_cycle(p, e, b));
}
BENCHMARK(BM_SimulateCycle);

void BM_PolicyForwardSingleRow(benchmark::State& state) {
  GaussianPolicy pol = full_policy();
  Eigen::MatrixXd obs = Eigen::MatrixXd::Constant(1, kObsDim, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(policy_mean_action(pol, obs));
}
BENCHMARK(BM_PolicyForwardSingleRow);

// one per-cycle decision at deployment: k deterministic refinements
void BM_KStepRefinement(benchmark::State& state) {
  GaussianPolicy pol = full_policy();
  const Bounds b = Bounds::defaults();
  const StepSizes steps = StepSizes::from(b);
  const EnvConditions e{14, 14, 45, 45};
  const ProcessParams start = b.midpoint();
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(refine_k_steps(pol, start, e, Season::SpringFall,
                                            TariffTier::OffPeak, k, b, steps, StepMode::Large));
}
BENCHMARK(BM_KStepRefinement)->Arg(7)->Arg(10);

// the competing per-cycle decision: one full evolutionary search
void BM_GaSearch(benchmark::State& state) {
  const Bounds b = Bounds::defaults();
  FitnessFn f = make_profit_fitness({14, 14, 45, 45}, Season::SpringFall, TariffTier::OffPeak);
  uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_ga(f, b, GaConfig{}, ++seed));
}
BENCHMARK(BM_GaSearch)->Unit(benchmark::kMillisecond);

void BM_SacUpdate(benchmark::State& state) {
  SacConfig cfg;
  Rng rng(2);
  SacAgent agent = make_sac_agent(kObsDim, kActDim, cfg, rng);
  ReplayBuffer buf(cfg.replay_capacity, kObsDim, kActDim);
  for (int i = 0; i < 4000; ++i) {
    State s{}, s2{};
    Action a{};
    for (double& x : s) x = rng.uniform(-1, 1);
    for (double& x : s2) x = rng.uniform(-1, 1);
    for (double& x : a) x = rng.uniform(-1, 1);
    buf.store(s, a, rng.normal(), s2, i % 144 == 143 ? 1.0 : 0.0);
  }
  SacOptState opt{AdamState(agent.actor.param_count(), cfg.lr),
                  AdamState(agent.q1.param_count(), cfg.lr),
                  AdamState(agent.q2.param_count(), cfg.lr)};
  Rng upd(3);
  for (auto _ : state) benchmark::DoNotOptimize(sac_update(buf, agent, cfg, opt, upd));
}
BENCHMARK(BM_SacUpdate)->Unit(benchmark::kMillisecond);

void BM_PpoMinibatchGrad(benchmark::State& state) {
  PpoConfig cfg;
  Rng rng(4);
  GaussianPolicy pol = make_state_logstd_policy(kObsDim, kActDim, cfg.hidden, cfg.activation,
                                                rng, cfg.logstd_init);
  const int B = cfg.minibatch;
  Eigen::MatrixXd obs(B, kObsDim), actions(B, kActDim);
  for (int i = 0; i < B; ++i) {
    for (int j = 0; j < kObsDim; ++j) obs(i, j) = rng.uniform(-1, 1);
    for (int j = 0; j < kActDim; ++j) actions(i, j) = rng.normal();
  }
  PolicyForward fwd = policy_forward(pol, obs, false);
  Eigen::VectorXd logp_old = gaussian_logprob(actions, fwd.mean, fwd.logstd);
  Eigen::VectorXd adv = Eigen::VectorXd::Random(B);
  std::vector<double> grad(pol.param_count());
  for (auto _ : state) {
    std::fill(grad.begin(), grad.end(), 0.0);
    benchmark::DoNotOptimize(ppo_policy_loss_grad(pol, obs, actions, logp_old, adv, cfg.clip_eps,
                                                  cfg.entropy_coef, &grad, nullptr));
  }
}
BENCHMARK(BM_PpoMinibatchGrad)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
