#include "hwnroute/dqn/replay.hpp"

#include <algorithm>

#include "hwnroute/error.hpp"

namespace hwnroute::dqn {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error("replay buffer capacity must be positive");
}

void ReplayBuffer::add(Experience e) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(e));
  } else {
    items_[head_] = std::move(e);
  }
  head_ = (head_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample(std::size_t batch, std::mt19937_64& rng) const {
  const std::size_t n = items_.size();
  if (n == 0) throw Error("cannot sample from an empty replay buffer");
  if (batch > n) throw Error("replay buffer holds fewer experiences than the batch size");
  std::vector<std::size_t> picked;
  picked.reserve(batch);
  for (std::size_t j = n - batch; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const std::size_t t = pick(rng);
    if (std::find(picked.begin(), picked.end(), t) == picked.end()) {
      picked.push_back(t);
    } else {
      picked.push_back(j);
    }
  }
  return picked;
}

void ReplayBuffer::restore(std::vector<Experience> items, std::size_t head) {
  if (items.size() > capacity_ || head >= capacity_) throw Error("replay buffer restore out of range");
  items_ = std::move(items);
  head_ = head;
}

}  // namespace hwnroute::dqn
