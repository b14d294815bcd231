#include "moldopt/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace moldopt {

using nlohmann::json;

std::vector<std::string> Checkpoint::canonical_one_hot_order() {
  std::vector<std::string> out;
  for (Season s : {Season::SpringFall, Season::Summer, Season::Winter})
    for (TariffTier t : {TariffTier::OffPeak, TariffTier::MidPeak, TariffTier::OnPeak})
      out.push_back(std::string(to_string(s)) + ":" + to_string(t));
  return out;
}

namespace {

long flat_count(const std::vector<int>& widths) {
  long n = 0;
  for (size_t l = 0; l + 1 < widths.size(); ++l)
    n += static_cast<long>(widths[l + 1]) * widths[l] + widths[l + 1];
  return n;
}

json net_to_json(const Mlp& net) {
  return json{{"widths", net.widths()},
              {"activation", to_string(net.activation())},
              {"params", net.params()}};
}

Mlp net_from_json(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("widths") || !j.contains("activation") ||
      !j.contains("params"))
    throw CheckpointError(CheckpointError::Kind::Parse, what + ": missing network fields");
  std::vector<int> widths = j.at("widths").get<std::vector<int>>();
  if (widths.size() < 2)
    throw CheckpointError(CheckpointError::Kind::Shape, what + ": needs at least two widths");
  for (int w : widths)
    if (w <= 0) throw CheckpointError(CheckpointError::Kind::Shape, what + ": nonpositive width");
  std::vector<double> params = j.at("params").get<std::vector<double>>();
  if (static_cast<long>(params.size()) != flat_count(widths))
    throw CheckpointError(CheckpointError::Kind::Shape,
                          what + ": parameter count does not match widths");
  Mlp net(widths, activation_from_string(j.at("activation").get<std::string>()));
  net.params() = std::move(params);
  return net;
}

}  // namespace

void Checkpoint::validate() const {
  if (version != kCheckpointVersion)
    throw CheckpointError(CheckpointError::Kind::Version,
                          "unsupported checkpoint version " + std::to_string(version));
  if (algo != "ppo" && algo != "sac")
    throw CheckpointError(CheckpointError::Kind::Algo, "unknown algorithm tag: " + algo);
  if (policy.act_dim <= 0 || policy.net.widths().size() < 2)
    throw CheckpointError(CheckpointError::Kind::Shape, "policy network missing");
  const int out = policy.net.out_dim();
  if (policy.state_dependent_std()) {
    if (out != 2 * policy.act_dim)
      throw CheckpointError(CheckpointError::Kind::Shape,
                            "state-dependent-std policy must output 2*act_dim");
  } else {
    if (out != policy.act_dim)
      throw CheckpointError(CheckpointError::Kind::Shape, "policy output must equal act_dim");
    if (static_cast<int>(policy.logstd.size()) != policy.act_dim)
      throw CheckpointError(CheckpointError::Kind::Shape, "logstd length must equal act_dim");
  }
  try {
    bounds.validate();
  } catch (const std::exception& e) {
    throw CheckpointError(CheckpointError::Kind::Bounds, e.what());
  }
  if (one_hot_order != canonical_one_hot_order())
    throw CheckpointError(CheckpointError::Kind::Order,
                          "price one-hot ordering does not match this build");
  if (extra_names.size() != extra_nets.size())
    throw CheckpointError(CheckpointError::Kind::Parse, "extra net names/nets length mismatch");
}

std::string Checkpoint::to_json_text() const {
  json j;
  j["format_version"] = version;
  j["algorithm"] = algo;
  j["step_mode"] = to_string(step_mode);
  j["seed"] = seed;
  j["bounds"] = {{"param_lo", bounds.param_lo},
                 {"param_hi", bounds.param_hi},
                 {"env_lo", bounds.env_lo},
                 {"env_hi", bounds.env_hi}};
  j["one_hot_order"] = one_hot_order;
  j["config"] = config_json;
  json pol = net_to_json(policy.net);
  pol["squashed"] = policy.squashed;
  pol["act_dim"] = policy.act_dim;
  pol["logstd"] = policy.logstd;
  j["policy"] = pol;
  json nets = json::array();
  for (size_t i = 0; i < extra_nets.size(); ++i) {
    json n = net_to_json(extra_nets[i]);
    n["name"] = extra_names[i];
    nets.push_back(n);
  }
  j["nets"] = nets;
  return j.dump(1);
}

Checkpoint Checkpoint::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw CheckpointError(CheckpointError::Kind::Parse, e.what());
  }
  Checkpoint ck;
  try {
    ck.version = j.at("format_version").get<int>();
    if (ck.version != kCheckpointVersion)
      throw CheckpointError(CheckpointError::Kind::Version,
                            "unsupported checkpoint version " + std::to_string(ck.version));
    ck.algo = j.at("algorithm").get<std::string>();
    ck.step_mode = step_mode_from_string(j.at("step_mode").get<std::string>());
    ck.seed = j.at("seed").get<uint64_t>();
    const json& b = j.at("bounds");
    ck.bounds.param_lo = b.at("param_lo").get<std::array<double, 10>>();
    ck.bounds.param_hi = b.at("param_hi").get<std::array<double, 10>>();
    ck.bounds.env_lo = b.at("env_lo").get<std::array<double, 4>>();
    ck.bounds.env_hi = b.at("env_hi").get<std::array<double, 4>>();
    ck.one_hot_order = j.at("one_hot_order").get<std::vector<std::string>>();
    ck.config_json = j.at("config").get<std::string>();
    const json& pol = j.at("policy");
    ck.policy.net = net_from_json(pol, "policy");
    ck.policy.squashed = pol.at("squashed").get<bool>();
    ck.policy.act_dim = pol.at("act_dim").get<int>();
    ck.policy.logstd = pol.at("logstd").get<std::vector<double>>();
    for (const json& n : j.at("nets")) {
      ck.extra_names.push_back(n.at("name").get<std::string>());
      ck.extra_nets.push_back(net_from_json(n, n.at("name").get<std::string>()));
    }
  } catch (const CheckpointError&) {
    throw;
  } catch (const json::exception& e) {
    throw CheckpointError(CheckpointError::Kind::Parse, e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(CheckpointError::Kind::Parse, e.what());
  }
  ck.validate();
  return ck;
}

void Checkpoint::save(const std::string& path) const {
  validate();
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << to_json_text();
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CheckpointError(CheckpointError::Kind::Parse, "cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_json_text(ss.str());
}

}  // namespace moldopt
