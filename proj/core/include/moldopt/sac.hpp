#pragma once

#include <Eigen/Dense>
#include <vector>

#include "moldopt/env.hpp"
#include "moldopt/nn.hpp"
#include "moldopt/trainlog.hpp"

namespace moldopt {

struct SacConfig {
  std::vector<int> hidden{256, 256};
  Activation activation = Activation::ReLU;
  double lr = 3e-4;  // actor and critics
  long total_steps = 180000;
  int replay_capacity = 25000;
  double gamma = 0.99;
  int learning_starts = 2016;
  int train_freq = 72;  // every train_freq env steps run train_freq updates
  double tau = 0.005;
  double alpha = 0.1;  // fixed entropy temperature
  int batch_size = 256;
  double logstd_bias_init = -1.0;
  bool random_episode_start = true;
  void validate() const;
};

// fixed-capacity ring of transitions with FIFO eviction and uniform sampling
class ReplayBuffer {
 public:
  ReplayBuffer(int capacity, int obs_dim, int act_dim);

  void store(const State& s, const Action& a, double reward, const State& next_s, double done);

  int size() const { return size_; }
  int capacity() const { return capacity_; }

  // uniform without replacement; throws logic_error when size < n
  std::vector<int> sample_indices(int n, Rng& rng) const;

  struct Batch {
    Eigen::MatrixXd obs, act, next_obs;
    Eigen::VectorXd rew, done;
  };
  Batch gather(const std::vector<int>& idx) const;

  // oldest-first logical index -> storage row (exposed for eviction tests)
  const Eigen::MatrixXd& raw_obs() const { return obs_; }

 private:
  int capacity_, size_ = 0, head_ = 0;
  Eigen::MatrixXd obs_, act_, next_obs_;
  Eigen::VectorXd rew_, done_;
};

struct SacAgent {
  GaussianPolicy actor;  // tanh-squashed, log-std head
  Mlp q1, q2;            // Q(s,a): input obs|act, scalar output
  Mlp q1_target, q2_target;
};

SacAgent make_sac_agent(int obs_dim, int act_dim, const SacConfig& cfg, Rng& rng);

// y_i = r_i + gamma * (1 - done_i) * (min_q_next_i - alpha * logp_next_i)
Eigen::VectorXd sac_target_values(const Eigen::VectorXd& rew, const Eigen::VectorXd& done,
                                  const Eigen::VectorXd& min_q_next,
                                  const Eigen::VectorXd& logp_next, double gamma, double alpha);

// samples a' at next_obs with the given noise, evaluates target critics
Eigen::VectorXd sac_target(const ReplayBuffer::Batch& batch, const GaussianPolicy& actor,
                           const Mlp& q1_target, const Mlp& q2_target, double gamma, double alpha,
                           const Eigen::MatrixXd& noise);

// loss = mean((Q(s,a) - target)^2); accumulates into grad when non-null
double sac_critic_loss_grad(const Mlp& q, const Eigen::MatrixXd& obs, const Eigen::MatrixXd& act,
                            const Eigen::VectorXd& target, std::vector<double>* grad);

// loss = mean(alpha*log pi(a|s) - min_j Q_j(s,a)) with a = tanh(mean + std*noise);
// critics are frozen. Returns loss; optionally reports entropy and mean Q.
double sac_actor_loss_grad(const GaussianPolicy& actor, const Mlp& q1, const Mlp& q2,
                           const Eigen::MatrixXd& obs, const Eigen::MatrixXd& noise, double alpha,
                           std::vector<double>* grad, double* entropy_est, double* mean_q);

// target <- tau*online + (1-tau)*target
void polyak_update(std::vector<double>& target, const std::vector<double>& online, double tau);

struct SacDiag {
  double q1_loss = 0, q2_loss = 0, actor_loss = 0, mean_q = 0, entropy = 0;
};

struct SacOptState {
  AdamState actor, q1, q2;
};

SacDiag sac_update(const ReplayBuffer& buf, SacAgent& agent, const SacConfig& cfg,
                   SacOptState& opt, Rng& rng);

struct SacTrainResult {
  SacAgent agent;
  TrainLog log;  // episode,steps_total,episode_return,mean_reward,defects,policy_loss,entropy,q1_loss,q2_loss,mean_q
  long steps = 0;
  int episodes = 0;
  long updates = 0;
  double seconds = 0;
};

SacTrainResult train_sac(const EnvFactory& make_env, const SacConfig& cfg, uint64_t seed);

}  // namespace moldopt
