// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <deque>
#include <vector>

#include "mmbf/rng.hpp"

namespace mmbf {

struct Experience {
  Eigen::VectorXd state;
  int action = 0;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool terminal = false;
};

/// FIFO experience store with uniform without-replacement sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Experience e);
  std::size_t size() const { return store_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool ready(std::size_t batch_size) const { return store_.size() >= batch_size; }

  /// i-th oldest surviving experience.
  const Experience& at(std::size_t i) const { return store_.at(i); }

  /// Uniform sample of batch_size distinct slots. Throws std::logic_error
  /// when the buffer is underfilled; callers skip the gradient step then.
  std::vector<Experience> sample(Rng& rng, std::size_t batch_size) const;

 private:
  std::size_t capacity_;
  std::deque<Experience> store_;
};

}  // namespace mmbf
