#pragma once

#include <string>
#include <vector>

namespace moldopt {

// per-episode summary shared by both trainers
struct EpisodeStat {
  int episode = 0;        // 1-based
  long steps_total = 0;   // cumulative env steps at episode end
  double episode_return = 0;
  double mean_reward = 0;  // episode_return / episode length
  int defects = 0;         // defective cavities over the episode
};

// columnar numeric log with a fixed header; serializes losslessly
struct TrainLog {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
  std::string to_csv_text() const;
  void save_csv(const std::string& path) const;
};

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace moldopt
