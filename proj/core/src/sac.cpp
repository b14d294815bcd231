#include "moldopt/sac.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace moldopt {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void SacConfig::validate() const {
  if (hidden.empty()) throw std::invalid_argument("sac: hidden layers required");
  if (replay_capacity <= 0 || batch_size <= 0 || train_freq <= 0)
    throw std::invalid_argument("sac: capacity/batch/train_freq must be positive");
  if (learning_starts > replay_capacity)
    throw std::invalid_argument("sac: learning_starts must not exceed replay capacity");
  if (learning_starts < batch_size)
    throw std::invalid_argument("sac: learning_starts must cover at least one batch");
  if (tau <= 0 || tau > 1 || gamma <= 0 || gamma > 1 || alpha < 0 || lr <= 0)
    throw std::invalid_argument("sac: bad tau/gamma/alpha/lr");
}

ReplayBuffer::ReplayBuffer(int capacity, int obs_dim, int act_dim)
    : capacity_(capacity),
      obs_(capacity, obs_dim),
      act_(capacity, act_dim),
      next_obs_(capacity, obs_dim),
      rew_(capacity),
      done_(capacity) {
  if (capacity <= 0) throw std::invalid_argument("replay capacity must be positive");
}

void ReplayBuffer::store(const State& s, const Action& a, double reward, const State& next_s,
                         double done) {
  for (int j = 0; j < static_cast<int>(s.size()); ++j) obs_(head_, j) = s[j];
  for (int j = 0; j < static_cast<int>(a.size()); ++j) act_(head_, j) = a[j];
  for (int j = 0; j < static_cast<int>(next_s.size()); ++j) next_obs_(head_, j) = next_s[j];
  rew_(head_) = reward;
  done_(head_) = done;
  head_ = (head_ + 1) % capacity_;  // FIFO overwrite once full
  if (size_ < capacity_) ++size_;
}

std::vector<int> ReplayBuffer::sample_indices(int n, Rng& rng) const {
  if (n > size_) throw std::logic_error("replay sample: not enough stored transitions");
  // Floyd's algorithm: n distinct rows, uniform over all size_-subsets
  std::vector<int> out;
  out.reserve(n);
  std::unordered_set<int> seen;
  for (int j = size_ - n; j < size_; ++j) {
    int t = static_cast<int>(rng.uniform_int(j + 1));
    if (seen.count(t)) t = j;
    seen.insert(t);
    out.push_back(t);
  }
  return out;
}

ReplayBuffer::Batch ReplayBuffer::gather(const std::vector<int>& idx) const {
  const int n = static_cast<int>(idx.size());
  Batch b{MatrixXd(n, obs_.cols()), MatrixXd(n, act_.cols()), MatrixXd(n, next_obs_.cols()),
          VectorXd(n), VectorXd(n)};
  for (int r = 0; r < n; ++r) {
    const int k = idx[r];
    if (k < 0 || k >= size_) throw std::out_of_range("replay gather: bad index");
    b.obs.row(r) = obs_.row(k);
    b.act.row(r) = act_.row(k);
    b.next_obs.row(r) = next_obs_.row(k);
    b.rew(r) = rew_(k);
    b.done(r) = done_(k);
  }
  return b;
}

SacAgent make_sac_agent(int obs_dim, int act_dim, const SacConfig& cfg, Rng& rng) {
  SacAgent ag;
  ag.actor = make_squashed_policy(obs_dim, act_dim, cfg.hidden, cfg.activation, rng,
                                  cfg.logstd_bias_init);
  std::vector<int> qwidths;
  qwidths.push_back(obs_dim + act_dim);
  for (int h : cfg.hidden) qwidths.push_back(h);
  qwidths.push_back(1);
  ag.q1 = Mlp(qwidths, cfg.activation);
  ag.q2 = Mlp(qwidths, cfg.activation);
  ag.q1.init(rng, std::sqrt(2.0), 1.0);
  ag.q2.init(rng, std::sqrt(2.0), 1.0);
  ag.q1_target = ag.q1;
  ag.q2_target = ag.q2;
  return ag;
}

VectorXd sac_target_values(const VectorXd& rew, const VectorXd& done, const VectorXd& min_q_next,
                           const VectorXd& logp_next, double gamma, double alpha) {
  return rew.array() +
         gamma * (1.0 - done.array()) * (min_q_next.array() - alpha * logp_next.array());
}

namespace {
MatrixXd concat_cols(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a;
  out.rightCols(b.cols()) = b;
  return out;
}
}  // namespace

VectorXd sac_target(const ReplayBuffer::Batch& batch, const GaussianPolicy& actor,
                    const Mlp& q1_target, const Mlp& q2_target, double gamma, double alpha,
                    const MatrixXd& noise) {
  PolicyForward fwd = policy_forward(actor, batch.next_obs, false);
  PolicySample ps = policy_sample(actor, fwd, noise);
  MatrixXd qin = concat_cols(batch.next_obs, ps.a);
  VectorXd q1v = q1_target.forward(qin).col(0);
  VectorXd q2v = q2_target.forward(qin).col(0);
  VectorXd min_q = q1v.cwiseMin(q2v);
  return sac_target_values(batch.rew, batch.done, min_q, ps.logp, gamma, alpha);
}

double sac_critic_loss_grad(const Mlp& q, const MatrixXd& obs, const MatrixXd& act,
                            const VectorXd& target, std::vector<double>* grad) {
  const int B = static_cast<int>(obs.rows());
  MatrixXd qin = concat_cols(obs, act);
  MlpCache cache;
  VectorXd v = q.forward(qin, grad ? &cache : nullptr).col(0);
  VectorXd diff = v - target;
  const double loss = diff.squaredNorm() / B;
  if (grad) {
    MatrixXd dy = (2.0 / B) * diff;
    q.backward(cache, dy, grad->data(), false);
  }
  return loss;
}

double sac_actor_loss_grad(const GaussianPolicy& actor, const Mlp& q1, const Mlp& q2,
                           const MatrixXd& obs, const MatrixXd& noise, double alpha,
                           std::vector<double>* grad, double* entropy_est, double* mean_q) {
  const int B = static_cast<int>(obs.rows());
  const int A = actor.act_dim;
  PolicyForward fwd = policy_forward(actor, obs, grad != nullptr);
  MatrixXd sigma = fwd.logstd.array().exp();
  MatrixXd u = fwd.mean + sigma.cwiseProduct(noise);
  MatrixXd t = u.array().tanh();
  VectorXd logp = gaussian_logprob(u, fwd.mean, fwd.logstd) - squash_correction(u);

  MatrixXd qin = concat_cols(obs, t);
  MlpCache c1, c2;
  VectorXd q1v = q1.forward(qin, grad ? &c1 : nullptr).col(0);
  VectorXd q2v = q2.forward(qin, grad ? &c2 : nullptr).col(0);
  VectorXd qmin = q1v.cwiseMin(q2v);

  const double loss = (alpha * logp - qmin).mean();
  if (entropy_est) *entropy_est = -logp.mean();
  if (mean_q) *mean_q = qmin.mean();

  if (grad) {
    // d loss / d a via the per-row minimum critic (critics stay frozen)
    MatrixXd dy1 = MatrixXd::Zero(B, 1), dy2 = MatrixXd::Zero(B, 1);
    for (int i = 0; i < B; ++i)
      (q1v(i) <= q2v(i) ? dy1 : dy2)(i, 0) = -1.0 / B;
    MatrixXd dx1 = q1.backward(c1, dy1, nullptr, true);
    MatrixXd dx2 = q2.backward(c2, dy2, nullptr, true);
    MatrixXd dA = dx1.rightCols(A) + dx2.rightCols(A);

    // squash geometry shared by both paths
    MatrixXd one_m_t2 = 1.0 - t.array().square();
    // d(-log(1 - tanh(u)^2 + eps))/du
    MatrixXd s_corr =
        2.0 * t.array() * one_m_t2.array() / (one_m_t2.array() + GaussianPolicy::kSquashEps);

    // d loss/d u: Q path through a = tanh(u); entropy path through the
    // squash correction (the Gaussian term cancels under reparameterization)
    MatrixXd du = dA.cwiseProduct(one_m_t2) + (alpha / B) * s_corr;
    MatrixXd dmean = du;
    MatrixXd dlogstd =
        du.cwiseProduct(sigma.cwiseProduct(noise)) - (alpha / B) * MatrixXd::Ones(B, A);
    policy_backward(actor, fwd, dmean, dlogstd, grad->data(), nullptr);
  }
  return loss;
}

void polyak_update(std::vector<double>& target, const std::vector<double>& online, double tau) {
  if (target.size() != online.size()) throw std::invalid_argument("polyak: size mismatch");
  for (size_t i = 0; i < target.size(); ++i) target[i] = tau * online[i] + (1 - tau) * target[i];
}

SacDiag sac_update(const ReplayBuffer& buf, SacAgent& agent, const SacConfig& cfg,
                   SacOptState& opt, Rng& rng) {
  auto idx = buf.sample_indices(cfg.batch_size, rng);
  ReplayBuffer::Batch batch = buf.gather(idx);
  const int B = cfg.batch_size;

  MatrixXd target_noise(B, kActDim), actor_noise(B, kActDim);
  for (int i = 0; i < B; ++i)
    for (int j = 0; j < kActDim; ++j) target_noise(i, j) = rng.normal();
  for (int i = 0; i < B; ++i)
    for (int j = 0; j < kActDim; ++j) actor_noise(i, j) = rng.normal();

  VectorXd y = sac_target(batch, agent.actor, agent.q1_target, agent.q2_target, cfg.gamma,
                          cfg.alpha, target_noise);

  SacDiag d;
  std::vector<double> qgrad(agent.q1.param_count(), 0.0);
  d.q1_loss = sac_critic_loss_grad(agent.q1, batch.obs, batch.act, y, &qgrad);
  adam_step(agent.q1.params(), qgrad, opt.q1);
  std::fill(qgrad.begin(), qgrad.end(), 0.0);
  d.q2_loss = sac_critic_loss_grad(agent.q2, batch.obs, batch.act, y, &qgrad);
  adam_step(agent.q2.params(), qgrad, opt.q2);

  std::vector<double> agrad(agent.actor.param_count(), 0.0);
  d.actor_loss = sac_actor_loss_grad(agent.actor, agent.q1, agent.q2, batch.obs, actor_noise,
                                     cfg.alpha, &agrad, &d.entropy, &d.mean_q);
  adam_step(agent.actor.net.params(), agrad, opt.actor);

  polyak_update(agent.q1_target.params(), agent.q1.params(), cfg.tau);
  polyak_update(agent.q2_target.params(), agent.q2.params(), cfg.tau);
  return d;
}

SacTrainResult train_sac(const EnvFactory& make_env, const SacConfig& cfg, uint64_t seed) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed);

  SacTrainResult out;
  out.agent = make_sac_agent(kObsDim, kActDim, cfg, rng);
  SacOptState opt{AdamState(out.agent.actor.net.param_count(), cfg.lr),
                  AdamState(out.agent.q1.param_count(), cfg.lr),
                  AdamState(out.agent.q2.param_count(), cfg.lr)};
  ReplayBuffer buf(cfg.replay_capacity, kObsDim, kActDim);

  out.log.header = {"episode", "steps_total", "episode_return", "mean_reward", "defects",
                    "policy_loss", "entropy", "q1_loss", "q2_loss", "mean_q"};

  long steps = 0;
  long updates = 0;
  int episode_index = 0;
  SacDiag last;
  while (steps < cfg.total_steps) {
    Env env = make_env(episode_index++);
    State s = cfg.random_episode_start ? env.reset_random(rng) : env.reset_midpoint();
    EpisodeStat stat;
    stat.episode = episode_index;
    int ep_len = 0;
    while (!env.done()) {
      Eigen::Map<const Eigen::RowVectorXd> srow(s.data(), kObsDim);
      PolicyForward fwd = policy_forward(out.agent.actor, srow, false);
      MatrixXd noise(1, kActDim);
      for (int j = 0; j < kActDim; ++j) noise(0, j) = rng.normal();
      PolicySample ps = policy_sample(out.agent.actor, fwd, noise);
      Action a{};
      for (int j = 0; j < kActDim; ++j) a[j] = ps.a(0, j);

      Transition tr = env.step(a);
      // the day boundary truncates an ongoing task; targets keep bootstrapping
      // through it, so the horizon step is stored as non-terminal
      buf.store(s, a, tr.reward, tr.next_state, 0.0);
      stat.episode_return += tr.reward;
      stat.defects += kCavities - tr.good_count;
      s = tr.next_state;
      ++steps;
      ++ep_len;

      if (steps > cfg.learning_starts && steps % cfg.train_freq == 0) {
        for (int i = 0; i < cfg.train_freq; ++i) {
          last = sac_update(buf, out.agent, cfg, opt, rng);
          ++updates;
        }
      }
    }
    stat.steps_total = steps;
    stat.mean_reward = ep_len ? stat.episode_return / ep_len : 0.0;
    out.log.add({static_cast<double>(stat.episode), static_cast<double>(stat.steps_total),
                 stat.episode_return, stat.mean_reward, static_cast<double>(stat.defects),
                 last.actor_loss, last.entropy, last.q1_loss, last.q2_loss, last.mean_q});
  }
  out.steps = steps;
  out.episodes = episode_index;
  out.updates = updates;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace moldopt
