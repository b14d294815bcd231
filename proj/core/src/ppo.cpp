#include "moldopt/ppo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace moldopt {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void PpoConfig::validate() const {
  if (hidden.empty()) throw std::invalid_argument("ppo: hidden layers required");
  if (rollout_steps <= 0 || minibatch <= 0 || epochs <= 0)
    throw std::invalid_argument("ppo: rollout/minibatch/epochs must be positive");
  if (rollout_steps % minibatch != 0)
    throw std::invalid_argument("ppo: rollout_steps must be divisible by minibatch");
  if (rollout_steps % kEpisodeSteps != 0)
    throw std::invalid_argument("ppo: rollout_steps must cover whole episodes");
  if (clip_eps <= 0 || gamma <= 0 || gamma > 1 || gae_lambda < 0 || gae_lambda > 1)
    throw std::invalid_argument("ppo: bad clip/gamma/lambda");
  if (policy_lr <= 0 || value_lr <= 0) throw std::invalid_argument("ppo: bad learning rate");
}

RolloutBuffer::RolloutBuffer(int n, int obs_dim, int act_dim)
    : obs(n, obs_dim),
      actions(n, act_dim),
      logp(n),
      rewards(n),
      values(n),
      dones(n),
      advantages(n),
      returns(n) {}

std::pair<VectorXd, VectorXd> compute_gae(const VectorXd& rewards, const VectorXd& values,
                                          const VectorXd& dones, double gamma, double lambda) {
  const int n = static_cast<int>(rewards.size());
  if (values.size() != n + 1) throw std::invalid_argument("gae: values must have length n+1");
  if (dones.size() != n) throw std::invalid_argument("gae: dones must have length n");
  VectorXd adv(n), ret(n);
  double lastgae = 0.0;
  for (int t = n - 1; t >= 0; --t) {
    const double nonterm = 1.0 - dones(t);
    const double delta = rewards(t) + gamma * values(t + 1) * nonterm - values(t);
    lastgae = delta + gamma * lambda * nonterm * lastgae;
    adv(t) = lastgae;
    ret(t) = adv(t) + values(t);
  }
  return {adv, ret};
}

double ppo_policy_loss_grad(const GaussianPolicy& pol, const MatrixXd& obs, const MatrixXd& actions,
                            const VectorXd& logp_old, const VectorXd& adv, double clip_eps,
                            double entropy_coef, std::vector<double>* grad, PpoDiag* diag) {
  const int B = static_cast<int>(obs.rows());
  const int A = pol.act_dim;
  PolicyForward fwd = policy_forward(pol, obs, grad != nullptr);
  VectorXd logp = gaussian_logprob(actions, fwd.mean, fwd.logstd);
  VectorXd ratio = (logp - logp_old).array().exp();

  double surr = 0, clipped_count = 0;
  VectorXd dlogp = VectorXd::Zero(B);  // d(loss)/d(logp_i)
  for (int i = 0; i < B; ++i) {
    const double r = ratio(i);
    const double rc = std::clamp(r, 1.0 - clip_eps, 1.0 + clip_eps);
    const double m1 = r * adv(i), m2 = rc * adv(i);
    surr += std::min(m1, m2);
    if (m1 <= m2) dlogp(i) = -adv(i) * r / B;  // unclipped branch active
    if (std::abs(r - 1.0) > clip_eps) clipped_count += 1.0;
  }
  surr /= B;
  const double entropy = policy_entropy_rows(fwd.logstd).mean();
  const double loss = -surr - entropy_coef * entropy;

  if (diag) {
    diag->policy_loss = -surr;
    diag->entropy = entropy;
    diag->clip_fraction = clipped_count / B;
    diag->approx_kl = (logp_old - logp).mean();
  }

  if (grad) {
    // chain rule through the diagonal Gaussian density
    MatrixXd sigma = fwd.logstd.array().exp();
    MatrixXd z = (actions - fwd.mean).array() / sigma.array();
    MatrixXd dmean = (z.array() / sigma.array()).colwise() * dlogp.array();
    MatrixXd dlogstd = (z.array().square() - 1.0).colwise() * dlogp.array();
    dlogstd.array() -= entropy_coef / B;  // d(-c*mean entropy)/d logstd = -c/B per element
    double* net_grad = grad->data();
    double* logstd_grad = pol.state_dependent_std() ? nullptr : grad->data() + pol.net.param_count();
    policy_backward(pol, fwd, dmean, dlogstd, net_grad, logstd_grad);
  }
  return loss;
}

double value_loss_grad(const Mlp& value, const MatrixXd& obs, const VectorXd& target,
                       std::vector<double>* grad) {
  const int B = static_cast<int>(obs.rows());
  MlpCache cache;
  VectorXd v = value.forward(obs, grad ? &cache : nullptr).col(0);
  VectorXd diff = v - target;
  const double loss = diff.squaredNorm() / B;
  if (grad) {
    MatrixXd dy = (2.0 / B) * diff;
    value.backward(cache, dy, grad->data(), false);
  }
  return loss;
}

RolloutBuffer collect_rollout(const EnvFactory& make_env, int& episode_index,
                              const GaussianPolicy& policy, const Mlp& value, int n, double gamma,
                              double lambda, Rng& rng, bool random_start,
                              std::vector<EpisodeStat>* episode_stats, long steps_before) {
  if (n % kEpisodeSteps != 0)
    throw std::invalid_argument("collect_rollout: n must cover whole episodes");
  RolloutBuffer buf(n, kObsDim, kActDim);
  int t = 0;
  State last_next{};
  std::vector<int> horizon_rows;     // last step of each episode
  std::vector<State> horizon_obs;    // observation past that step
  while (t < n) {
    Env env = make_env(episode_index++);
    State s = random_start ? env.reset_random(rng) : env.reset_midpoint();
    EpisodeStat stat;
    stat.episode = episode_index;  // 1-based
    int ep_len = 0;
    while (!env.done()) {
      Eigen::Map<const Eigen::RowVectorXd> srow(s.data(), kObsDim);
      PolicyForward fwd = policy_forward(policy, srow, false);
      MatrixXd noise(1, kActDim);
      for (int j = 0; j < kActDim; ++j) noise(0, j) = rng.normal();
      PolicySample ps = policy_sample(policy, fwd, noise);

      Action a{};
      for (int j = 0; j < kActDim; ++j) a[j] = ps.a(0, j);
      Transition tr = env.step(a);

      buf.obs.row(t) = srow;
      buf.actions.row(t) = ps.a.row(0);
      buf.logp(t) = ps.logp(0);
      buf.rewards(t) = tr.reward;
      buf.dones(t) = tr.done ? 1.0 : 0.0;
      if (tr.done) {
        horizon_rows.push_back(t);
        horizon_obs.push_back(tr.next_state);
      }
      stat.episode_return += tr.reward;
      stat.defects += kCavities - tr.good_count;
      s = tr.next_state;
      last_next = tr.next_state;
      ++t;
      ++ep_len;
    }
    stat.steps_total = steps_before + t;
    stat.mean_reward = ep_len ? stat.episode_return / ep_len : 0.0;
    if (episode_stats) episode_stats->push_back(stat);
  }
  buf.size = n;
  buf.values = value.forward(buf.obs).col(0);
  Eigen::Map<const Eigen::RowVectorXd> brow(last_next.data(), kObsDim);
  buf.bootstrap_value = value.forward(brow)(0, 0);

  // the day boundary truncates an ongoing task rather than ending it: fold
  // gamma*V(s_T) into the final reward so value targets stay time-stationary
  // (the pinned state carries no step index that could express time-to-go)
  if (!horizon_rows.empty()) {
    MatrixXd hobs(static_cast<int>(horizon_rows.size()), kObsDim);
    for (size_t i = 0; i < horizon_rows.size(); ++i)
      hobs.row(static_cast<int>(i)) =
          Eigen::Map<const Eigen::RowVectorXd>(horizon_obs[i].data(), kObsDim);
    VectorXd hval = value.forward(hobs).col(0);
    for (size_t i = 0; i < horizon_rows.size(); ++i)
      buf.rewards(horizon_rows[i]) += gamma * hval(static_cast<int>(i));
  }

  VectorXd values_ext(n + 1);
  values_ext.head(n) = buf.values;
  values_ext(n) = buf.bootstrap_value;
  auto [adv, ret] = compute_gae(buf.rewards, values_ext, buf.dones, gamma, lambda);
  buf.advantages = adv;
  buf.returns = ret;
  return buf;
}

PpoDiag ppo_update(const RolloutBuffer& buf, GaussianPolicy& policy, Mlp& value,
                   const PpoConfig& cfg, AdamState& policy_opt, AdamState& value_opt, Rng& rng) {
  const int n = buf.size;
  const int mb = cfg.minibatch;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  PpoDiag sum;
  int updates = 0;
  std::vector<double> pgrad(policy.param_count());
  std::vector<double> vgrad(value.param_count());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_int(i + 1)]);
    for (int start = 0; start < n; start += mb) {
      const int m = std::min(mb, n - start);
      MatrixXd obs(m, kObsDim), act(m, kActDim);
      VectorXd lp(m), adv(m), ret(m);
      for (int r = 0; r < m; ++r) {
        const int k = order[start + r];
        obs.row(r) = buf.obs.row(k);
        act.row(r) = buf.actions.row(k);
        lp(r) = buf.logp(k);
        adv(r) = buf.advantages(k);
        ret(r) = buf.returns(k);
      }
      if (cfg.normalize_advantages && m > 1) {
        const double mean = adv.mean();
        const double sd = std::sqrt((adv.array() - mean).square().sum() / m);
        adv = (adv.array() - mean) / (sd + 1e-8);
      }

      std::fill(pgrad.begin(), pgrad.end(), 0.0);
      PpoDiag d;
      ppo_policy_loss_grad(policy, obs, act, lp, adv, cfg.clip_eps, cfg.entropy_coef, &pgrad, &d);
      if (cfg.grad_clip > 0) clip_grad_norm(pgrad, cfg.grad_clip);
      std::vector<double> pparams = policy.get_params();
      adam_step(pparams, pgrad, policy_opt);
      policy.set_params(pparams);

      std::fill(vgrad.begin(), vgrad.end(), 0.0);
      d.value_loss = value_loss_grad(value, obs, ret, &vgrad);
      if (cfg.grad_clip > 0) clip_grad_norm(vgrad, cfg.grad_clip);
      adam_step(value.params(), vgrad, value_opt);

      sum.policy_loss += d.policy_loss;
      sum.value_loss += d.value_loss;
      sum.entropy += d.entropy;
      sum.clip_fraction += d.clip_fraction;
      sum.approx_kl += d.approx_kl;
      ++updates;
    }
  }
  PpoDiag mean = sum;
  mean.policy_loss /= updates;
  mean.value_loss /= updates;
  mean.entropy /= updates;
  mean.clip_fraction /= updates;
  mean.approx_kl /= updates;
  return mean;
}

PpoTrainResult train_ppo(const EnvFactory& make_env, const PpoConfig& cfg, uint64_t seed) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed);

  PpoTrainResult out;
  out.policy = make_state_logstd_policy(kObsDim, kActDim, cfg.hidden, cfg.activation, rng,
                                        cfg.logstd_init);
  std::vector<int> vwidths;
  vwidths.push_back(kObsDim);
  for (int h : cfg.hidden) vwidths.push_back(h);
  vwidths.push_back(1);
  out.value = Mlp(vwidths, cfg.activation);
  out.value.init(rng, std::sqrt(2.0), 1.0);

  AdamState policy_opt(out.policy.param_count(), cfg.policy_lr);
  AdamState value_opt(out.value.param_count(), cfg.value_lr);

  out.log.header = {"episode",      "steps_total", "episode_return", "mean_reward",
                    "defects",      "policy_loss", "value_loss",     "entropy"};

  int episode_index = 0;
  long steps = 0;
  while (steps < cfg.total_steps) {
    std::vector<EpisodeStat> stats;
    RolloutBuffer buf = collect_rollout(make_env, episode_index, out.policy, out.value,
                                        cfg.rollout_steps, cfg.gamma, cfg.gae_lambda, rng,
                                        cfg.random_episode_start, &stats, steps);
    steps += buf.size;
    PpoDiag d = ppo_update(buf, out.policy, out.value, cfg, policy_opt, value_opt, rng);
    for (const auto& st : stats)
      out.log.add({static_cast<double>(st.episode), static_cast<double>(st.steps_total),
                   st.episode_return, st.mean_reward, static_cast<double>(st.defects),
                   d.policy_loss, d.value_loss, d.entropy});
  }
  out.steps = steps;
  out.episodes = episode_index;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace moldopt
