// SPDX-License-Identifier: Apache-2.0
#include "mmbf/replay.hpp"

#include <numeric>
#include <stdexcept>
#include <utility>

namespace mmbf {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be >= 1");
}

void ReplayBuffer::push(Experience e) {
  store_.push_back(std::move(e));
  if (store_.size() > capacity_) store_.pop_front();
}

std::vector<Experience> ReplayBuffer::sample(Rng& rng, std::size_t batch_size) const {
  if (!ready(batch_size))
    throw std::logic_error("replay buffer not ready for this batch size");
  // Partial Fisher-Yates: the first batch_size slots of indices end up a
  // uniform without-replacement draw.
  std::vector<std::size_t> indices(store_.size());
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  std::vector<Experience> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(
                rng.uniform_int(static_cast<int>(indices.size() - i)));
    std::swap(indices[i], indices[j]);
    batch.push_back(store_[indices[i]]);
  }
  return batch;
}

}  // namespace mmbf
