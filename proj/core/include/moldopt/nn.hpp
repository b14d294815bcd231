#pragma once

#include <Eigen/Dense>
#include <vector>

#include "moldopt/common.hpp"

namespace moldopt {

enum class Activation { Tanh, ReLU };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& name);

using RowMajorMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct MlpCache {
  // acts[0] = input, acts[l+1] = output of layer l (post-activation; last linear)
  std::vector<Eigen::MatrixXd> acts;
};

// fully connected net, 64-bit, flat parameter storage [W0|b0|W1|b1|...],
// each W row-major (out x in); hidden layers activated, output linear
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> widths, Activation act);

  // orthogonal rows/columns scaled by gain; biases zero
  void init(Rng& rng, double hidden_gain, double out_gain);

  int in_dim() const { return widths_.front(); }
  int out_dim() const { return widths_.back(); }
  int layer_count() const { return static_cast<int>(widths_.size()) - 1; }
  const std::vector<int>& widths() const { return widths_; }
  Activation activation() const { return act_; }
  int param_count() const { return static_cast<int>(theta_.size()); }
  std::vector<double>& params() { return theta_; }
  const std::vector<double>& params() const { return theta_; }

  // x: batch x in_dim; returns batch x out_dim
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, MlpCache* cache = nullptr) const;

  // dy: batch x out_dim. Accumulates parameter gradient into param_grad
  // (layout = params()) when non-null; returns dL/dx when want_dx.
  Eigen::MatrixXd backward(const MlpCache& cache, const Eigen::MatrixXd& dy, double* param_grad,
                           bool want_dx) const;

  Eigen::Map<RowMajorMat> weight(int l);
  Eigen::Map<const RowMajorMat> weight(int l) const;
  Eigen::Map<Eigen::VectorXd> bias(int l);
  Eigen::Map<const Eigen::VectorXd> bias(int l) const;

 private:
  std::vector<int> widths_;
  Activation act_ = Activation::Tanh;
  std::vector<double> theta_;
  std::vector<int> w_off_, b_off_;
};

struct AdamState {
  double lr = 3e-4;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long t = 0;
  std::vector<double> m, v;
  AdamState() = default;
  AdamState(int n, double lr_) : lr(lr_), m(n, 0.0), v(n, 0.0) {}
};

void adam_step(double* params, const double* grad, int n, AdamState& st);
inline void adam_step(std::vector<double>& p, const std::vector<double>& g, AdamState& st) {
  adam_step(p.data(), g.data(), static_cast<int>(p.size()), st);
}

double grad_norm(const std::vector<double>& g);
// scales g in place so its l2 norm is at most max_norm; returns the pre-clip norm
double clip_grad_norm(std::vector<double>& g, double max_norm);

// diagonal Gaussian policy head. Two variants:
//  - state-independent log-std vector (logstd non-empty), unsquashed
//  - log-std head as second half of the net output (logstd empty), tanh-squashed
struct GaussianPolicy {
  Mlp net;
  std::vector<double> logstd;
  bool squashed = false;
  int act_dim = 0;

  static constexpr double kLogStdMin = -20.0;
  static constexpr double kLogStdMax = 2.0;
  static constexpr double kSquashEps = 1e-6;

  bool state_dependent_std() const { return logstd.empty(); }
  int param_count() const { return net.param_count() + static_cast<int>(logstd.size()); }
  // flat layout: [net params | logstd]
  std::vector<double> get_params() const;
  void set_params(const std::vector<double>& p);
};

GaussianPolicy make_state_logstd_policy(int obs_dim, int act_dim, const std::vector<int>& hidden,
                                        Activation act, Rng& rng, double logstd_init);
GaussianPolicy make_squashed_policy(int obs_dim, int act_dim, const std::vector<int>& hidden,
                                    Activation act, Rng& rng, double logstd_bias_init);

struct PolicyForward {
  Eigen::MatrixXd mean;        // B x act
  Eigen::MatrixXd logstd;      // B x act (clamped for head variant)
  Eigen::MatrixXd raw_logstd;  // head variant only: pre-clamp values
  MlpCache cache;
};

PolicyForward policy_forward(const GaussianPolicy& pol, const Eigen::MatrixXd& obs,
                             bool need_cache);

// routes head gradients (wrt mean and pre-clamp logstd) back through the net;
// for the state-independent variant dlogstd accumulates into logstd_grad
void policy_backward(const GaussianPolicy& pol, const PolicyForward& fwd,
                     const Eigen::MatrixXd& dmean, const Eigen::MatrixXd& dlogstd,
                     double* net_grad, double* logstd_grad);

struct PolicySample {
  Eigen::MatrixXd u;  // pre-squash draw mean + std*noise
  Eigen::MatrixXd a;  // action (tanh(u) when squashed)
  Eigen::VectorXd logp;
};

// rowwise sum of log N(x; mean, exp(logstd))
Eigen::VectorXd gaussian_logprob(const Eigen::MatrixXd& x, const Eigen::MatrixXd& mean,
                                 const Eigen::MatrixXd& logstd);
// rowwise sum of log(1 - tanh(u)^2 + eps)
Eigen::VectorXd squash_correction(const Eigen::MatrixXd& u);

PolicySample policy_sample(const GaussianPolicy& pol, const PolicyForward& fwd,
                           const Eigen::MatrixXd& noise);

// deterministic action: mean, squashed through tanh for the head variant
Eigen::MatrixXd policy_mean_action(const GaussianPolicy& pol, const Eigen::MatrixXd& obs);

// per-row diagonal Gaussian entropy sum_j (0.5 log(2 pi e) + logstd_j)
Eigen::VectorXd policy_entropy_rows(const Eigen::MatrixXd& logstd);

}  // namespace moldopt
