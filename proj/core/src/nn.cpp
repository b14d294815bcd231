#include "moldopt/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace moldopt {

const char* to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "relu"; }

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::ReLU;
  throw std::invalid_argument("unknown activation: " + name);
}

Mlp::Mlp(std::vector<int> widths, Activation act) : widths_(std::move(widths)), act_(act) {
  if (widths_.size() < 2) throw std::invalid_argument("mlp needs at least input and output widths");
  for (int w : widths_)
    if (w <= 0) throw std::invalid_argument("mlp widths must be positive");
  int total = 0;
  for (int l = 0; l + 1 < static_cast<int>(widths_.size()); ++l) {
    w_off_.push_back(total);
    total += widths_[l + 1] * widths_[l];
    b_off_.push_back(total);
    total += widths_[l + 1];
  }
  theta_.assign(total, 0.0);
}

Eigen::Map<RowMajorMat> Mlp::weight(int l) {
  return {theta_.data() + w_off_[l], widths_[l + 1], widths_[l]};
}
Eigen::Map<const RowMajorMat> Mlp::weight(int l) const {
  return {theta_.data() + w_off_[l], widths_[l + 1], widths_[l]};
}
Eigen::Map<Eigen::VectorXd> Mlp::bias(int l) {
  return {theta_.data() + b_off_[l], widths_[l + 1]};
}
Eigen::Map<const Eigen::VectorXd> Mlp::bias(int l) const {
  return {theta_.data() + b_off_[l], widths_[l + 1]};
}

namespace {

// orthonormalize the rows (out <= in) or columns (out > in) of a Gaussian
// draw via modified Gram-Schmidt; standard scaled-orthogonal initializer
void orthogonalize(Eigen::MatrixXd& m) {
  bool by_rows = m.rows() <= m.cols();
  Eigen::MatrixXd q = by_rows ? m : m.transpose();  // q: k x n with k <= n
  for (int i = 0; i < q.rows(); ++i) {
    for (int j = 0; j < i; ++j) q.row(i) -= q.row(i).dot(q.row(j)) * q.row(j);
    double norm = q.row(i).norm();
    if (norm < 1e-12) throw std::runtime_error("orthogonal init: degenerate draw");
    q.row(i) /= norm;
  }
  m = by_rows ? q : Eigen::MatrixXd(q.transpose());
}

}  // namespace

void Mlp::init(Rng& rng, double hidden_gain, double out_gain) {
  for (int l = 0; l < layer_count(); ++l) {
    Eigen::MatrixXd w(widths_[l + 1], widths_[l]);
    for (int i = 0; i < w.rows(); ++i)
      for (int j = 0; j < w.cols(); ++j) w(i, j) = rng.normal();
    orthogonalize(w);
    double gain = (l == layer_count() - 1) ? out_gain : hidden_gain;
    weight(l) = gain * w;
    bias(l).setZero();
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, MlpCache* cache) const {
  if (x.cols() != in_dim()) throw std::invalid_argument("mlp forward: bad input width");
  if (cache) {
    cache->acts.clear();
    cache->acts.reserve(layer_count() + 1);
    cache->acts.push_back(x);
  }
  Eigen::MatrixXd h = x;
  for (int l = 0; l < layer_count(); ++l) {
    Eigen::MatrixXd y = h * weight(l).transpose();
    y.rowwise() += bias(l).transpose();
    if (l < layer_count() - 1) {
      if (act_ == Activation::Tanh)
        y = y.array().tanh();
      else
        y = y.cwiseMax(0.0);
    }
    if (cache) cache->acts.push_back(y);
    h = std::move(y);
  }
  return h;
}

Eigen::MatrixXd Mlp::backward(const MlpCache& cache, const Eigen::MatrixXd& dy, double* param_grad,
                              bool want_dx) const {
  if (static_cast<int>(cache.acts.size()) != layer_count() + 1)
    throw std::invalid_argument("mlp backward: cache/net mismatch");
  Eigen::MatrixXd d = dy;
  for (int l = layer_count() - 1; l >= 0; --l) {
    if (l < layer_count() - 1) {
      const Eigen::MatrixXd& post = cache.acts[l + 1];
      if (act_ == Activation::Tanh)
        d.array() *= 1.0 - post.array().square();
      else
        d.array() *= (post.array() > 0.0).cast<double>();
    }
    if (param_grad) {
      Eigen::Map<RowMajorMat> dw(param_grad + w_off_[l], widths_[l + 1], widths_[l]);
      dw.noalias() += d.transpose() * cache.acts[l];
      Eigen::Map<Eigen::VectorXd> db(param_grad + b_off_[l], widths_[l + 1]);
      db.noalias() += d.colwise().sum().transpose();
    }
    if (l > 0 || want_dx) d = Eigen::MatrixXd(d * weight(l));
  }
  return want_dx ? d : Eigen::MatrixXd();
}

void adam_step(double* params, const double* grad, int n, AdamState& st) {
  if (static_cast<int>(st.m.size()) != n || static_cast<int>(st.v.size()) != n)
    throw std::invalid_argument("adam: state size mismatch");
  st.t += 1;
  double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
  double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
  for (int i = 0; i < n; ++i) {
    st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * grad[i];
    st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * grad[i] * grad[i];
    double mhat = st.m[i] / bc1;
    double vhat = st.v[i] / bc2;
    params[i] -= st.lr * mhat / (std::sqrt(vhat) + st.eps);
  }
}

double grad_norm(const std::vector<double>& g) {
  double s = 0;
  for (double x : g) s += x * x;
  return std::sqrt(s);
}

double clip_grad_norm(std::vector<double>& g, double max_norm) {
  double n = grad_norm(g);
  if (n > max_norm && n > 0) {
    double scale = max_norm / n;
    for (double& x : g) x *= scale;
  }
  return n;
}

std::vector<double> GaussianPolicy::get_params() const {
  std::vector<double> p = net.params();
  p.insert(p.end(), logstd.begin(), logstd.end());
  return p;
}

void GaussianPolicy::set_params(const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != param_count())
    throw std::invalid_argument("policy set_params: size mismatch");
  std::copy(p.begin(), p.begin() + net.param_count(), net.params().begin());
  std::copy(p.begin() + net.param_count(), p.end(), logstd.begin());
}

GaussianPolicy make_state_logstd_policy(int obs_dim, int act_dim, const std::vector<int>& hidden,
                                        Activation act, Rng& rng, double logstd_init) {
  GaussianPolicy pol;
  std::vector<int> widths{obs_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(act_dim);
  pol.net = Mlp(widths, act);
  pol.net.init(rng, std::sqrt(2.0), 0.01);
  pol.logstd.assign(act_dim, logstd_init);
  pol.squashed = false;
  pol.act_dim = act_dim;
  return pol;
}

GaussianPolicy make_squashed_policy(int obs_dim, int act_dim, const std::vector<int>& hidden,
                                    Activation act, Rng& rng, double logstd_bias_init) {
  GaussianPolicy pol;
  std::vector<int> widths{obs_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(2 * act_dim);
  pol.net = Mlp(widths, act);
  pol.net.init(rng, std::sqrt(2.0), 0.01);
  int last = pol.net.layer_count() - 1;
  for (int j = 0; j < act_dim; ++j) pol.net.bias(last)[act_dim + j] = logstd_bias_init;
  pol.squashed = true;
  pol.act_dim = act_dim;
  return pol;
}

PolicyForward policy_forward(const GaussianPolicy& pol, const Eigen::MatrixXd& obs,
                             bool need_cache) {
  PolicyForward f;
  Eigen::MatrixXd out = pol.net.forward(obs, need_cache ? &f.cache : nullptr);
  int b = static_cast<int>(obs.rows());
  if (pol.state_dependent_std()) {
    f.mean = out.leftCols(pol.act_dim);
    f.raw_logstd = out.rightCols(pol.act_dim);
    f.logstd = f.raw_logstd.cwiseMax(GaussianPolicy::kLogStdMin).cwiseMin(GaussianPolicy::kLogStdMax);
  } else {
    f.mean = std::move(out);
    Eigen::Map<const Eigen::VectorXd> ls(pol.logstd.data(), pol.act_dim);
    f.logstd = ls.transpose().replicate(b, 1);
  }
  return f;
}

void policy_backward(const GaussianPolicy& pol, const PolicyForward& fwd,
                     const Eigen::MatrixXd& dmean, const Eigen::MatrixXd& dlogstd,
                     double* net_grad, double* logstd_grad) {
  if (pol.state_dependent_std()) {
    Eigen::MatrixXd dout(dmean.rows(), 2 * pol.act_dim);
    dout.leftCols(pol.act_dim) = dmean;
    // hard clamp: gradient passes only where the raw value was interior
    Eigen::ArrayXXd mask = (fwd.raw_logstd.array() > GaussianPolicy::kLogStdMin &&
                            fwd.raw_logstd.array() < GaussianPolicy::kLogStdMax)
                               .cast<double>();
    dout.rightCols(pol.act_dim) = dlogstd.array() * mask;
    pol.net.backward(fwd.cache, dout, net_grad, false);
  } else {
    pol.net.backward(fwd.cache, dmean, net_grad, false);
    if (logstd_grad) {
      for (int j = 0; j < pol.act_dim; ++j) logstd_grad[j] += dlogstd.col(j).sum();
    }
  }
}

Eigen::VectorXd gaussian_logprob(const Eigen::MatrixXd& x, const Eigen::MatrixXd& mean,
                                 const Eigen::MatrixXd& logstd) {
  const double kLog2Pi = std::log(2.0 * kPi);
  Eigen::ArrayXXd z = (x - mean).array() * (-logstd).array().exp();
  Eigen::ArrayXXd terms = -0.5 * z.square() - logstd.array() - 0.5 * kLog2Pi;
  return terms.rowwise().sum().matrix();
}

Eigen::VectorXd squash_correction(const Eigen::MatrixXd& u) {
  Eigen::ArrayXXd t = u.array().tanh();
  return (1.0 - t.square() + GaussianPolicy::kSquashEps).log().rowwise().sum().matrix();
}

PolicySample policy_sample(const GaussianPolicy& pol, const PolicyForward& fwd,
                           const Eigen::MatrixXd& noise) {
  PolicySample s;
  s.u = fwd.mean.array() + fwd.logstd.array().exp() * noise.array();
  s.logp = gaussian_logprob(s.u, fwd.mean, fwd.logstd);
  if (pol.squashed) {
    s.a = s.u.array().tanh();
    s.logp -= squash_correction(s.u);
  } else {
    s.a = s.u;
  }
  return s;
}

Eigen::MatrixXd policy_mean_action(const GaussianPolicy& pol, const Eigen::MatrixXd& obs) {
  PolicyForward f = policy_forward(pol, obs, false);
  if (pol.squashed) return f.mean.array().tanh();
  return f.mean;
}

Eigen::VectorXd policy_entropy_rows(const Eigen::MatrixXd& logstd) {
  const double kHalfLog2PiE = 0.5 * std::log(2.0 * kPi * std::exp(1.0));
  return (logstd.array() + kHalfLog2PiE).rowwise().sum().matrix();
}

}  // namespace moldopt
