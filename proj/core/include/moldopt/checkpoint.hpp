#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "moldopt/bounds.hpp"
#include "moldopt/nn.hpp"

namespace moldopt {

inline constexpr int kCheckpointVersion = 1;

// load failures carry a machine-checkable kind so callers can tell a stale
// format from a corrupted or mismatched artifact
struct CheckpointError : std::runtime_error {
  enum class Kind { Parse, Version, Shape, Algo, Bounds, Order };
  Kind kind;
  CheckpointError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// everything needed to redeploy a trained policy deterministically
struct Checkpoint {
  int version = kCheckpointVersion;
  std::string algo;  // "ppo" | "sac"
  StepMode step_mode = StepMode::Large;
  uint64_t seed = 0;
  Bounds bounds;
  std::vector<std::string> one_hot_order;  // price-context slot labels, season-major
  std::string config_json;                 // snapshot of the run configuration (opaque)
  GaussianPolicy policy;
  std::vector<std::string> extra_names;  // parallel to extra_nets (value / critics)
  std::vector<Mlp> extra_nets;

  static std::vector<std::string> canonical_one_hot_order();

  void validate() const;  // throws CheckpointError
  std::string to_json_text() const;
  static Checkpoint from_json_text(const std::string& text);
  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace moldopt
