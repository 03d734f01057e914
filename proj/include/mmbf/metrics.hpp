// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace mmbf {

/// One (time step, BS) row of the metrics stream.
struct StepRecord {
  int episode = 0;
  int step = 0;
  int bs_id = 0;
  int action = 0;
  double reward = 0.0;
  double r_omni = 0.0;  // R^oj: omni sum-rate of the BS's associated UEs
  double r_beam = 0.0;  // R^j: beamformed sum-rate of the same UEs
  double sum_ddqn = 0.0;
  double sum_exhaustive = 0.0;
  double sum_random = 0.0;
  double epsilon = 0.0;
  std::optional<double> loss;  // absent until the replay buffer is ready
};

inline constexpr const char* kMetricsHeader =
    "episode,step,bs_id,action,reward,r_omni,r_beam,sum_ddqn,sum_exhaustive,"
    "sum_random,epsilon,loss";

/// Streams records to a CSV file: the exact header above, floats with 6
/// significant digits, UTF-8, LF line endings, empty loss cell when absent.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::filesystem::path& path);
  void write(const StepRecord& r);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

std::string format_record(const StepRecord& r);

std::vector<StepRecord> read_metrics_csv(const std::filesystem::path& path);

}  // namespace mmbf
