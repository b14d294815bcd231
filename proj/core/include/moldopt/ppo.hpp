#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "moldopt/env.hpp"
#include "moldopt/nn.hpp"
#include "moldopt/trainlog.hpp"

namespace moldopt {

struct PpoConfig {
  std::vector<int> hidden{256, 256};
  Activation activation = Activation::Tanh;
  double policy_lr = 3e-4;
  double value_lr = 1e-3;  // separate value network
  long total_steps = 180000;
  int rollout_steps = 720;  // 5 episodes of 144
  double gamma = 0.99;
  double clip_eps = 0.2;
  double gae_lambda = 0.95;
  double entropy_coef = 0.005;
  int epochs = 10;
  int minibatch = 72;  // must divide rollout_steps
  double grad_clip = 0.5;
  double logstd_init = -0.5;
  bool normalize_advantages = true;      // per minibatch
  bool random_episode_start = true;      // training episodes start from uniform setpoints
  void validate() const;
};

// on-policy storage for exactly one rollout; cleared after each update
struct RolloutBuffer {
  Eigen::MatrixXd obs;      // n x obs_dim
  Eigen::MatrixXd actions;  // n x act_dim (raw Gaussian draws, pre-clamp)
  Eigen::VectorXd logp, rewards, values, dones;
  Eigen::VectorXd advantages, returns;
  double bootstrap_value = 0;  // V(s_n); masked out when the last step terminates
  int size = 0;

  RolloutBuffer(int n, int obs_dim, int act_dim);
  bool full() const { return size == static_cast<int>(obs.rows()); }
  void clear() { size = 0; }
};

// advantages/returns from one-step TD errors; `values` carries the bootstrap
// estimate at index n. The weighted sum truncates at episode ends (dones).
std::pair<Eigen::VectorXd, Eigen::VectorXd> compute_gae(const Eigen::VectorXd& rewards,
                                                        const Eigen::VectorXd& values,
                                                        const Eigen::VectorXd& dones, double gamma,
                                                        double lambda);

struct PpoDiag {
  double policy_loss = 0, value_loss = 0, entropy = 0, clip_fraction = 0, approx_kl = 0;
};

// loss = -mean(min(ratio*A, clip(ratio)*A)) - entropy_coef*mean(entropy);
// accumulates d(loss)/d(params) into grad (layout [net|logstd]) when non-null
double ppo_policy_loss_grad(const GaussianPolicy& pol, const Eigen::MatrixXd& obs,
                            const Eigen::MatrixXd& actions, const Eigen::VectorXd& logp_old,
                            const Eigen::VectorXd& adv, double clip_eps, double entropy_coef,
                            std::vector<double>* grad, PpoDiag* diag);

// loss = mean((V(s) - target)^2); accumulates into grad when non-null
double value_loss_grad(const Mlp& value, const Eigen::MatrixXd& obs,
                       const Eigen::VectorXd& target, std::vector<double>* grad);

// runs whole episodes (n must be a multiple of the episode length) with
// stochastic actions; fills values and GAE targets before returning
RolloutBuffer collect_rollout(const EnvFactory& make_env, int& episode_index,
                              const GaussianPolicy& policy, const Mlp& value, int n,
                              double gamma, double lambda, Rng& rng, bool random_start,
                              std::vector<EpisodeStat>* episode_stats, long steps_before);

// epochs x minibatches of Adam on policy and value nets; returns means of the
// per-minibatch diagnostics
PpoDiag ppo_update(const RolloutBuffer& buf, GaussianPolicy& policy, Mlp& value,
                   const PpoConfig& cfg, AdamState& policy_opt, AdamState& value_opt, Rng& rng);

struct PpoTrainResult {
  GaussianPolicy policy;
  Mlp value;
  TrainLog log;  // episode,steps_total,episode_return,mean_reward,defects,policy_loss,value_loss,entropy
  long steps = 0;
  int episodes = 0;
  double seconds = 0;
};

PpoTrainResult train_ppo(const EnvFactory& make_env, const PpoConfig& cfg, uint64_t seed);

}  // namespace moldopt
