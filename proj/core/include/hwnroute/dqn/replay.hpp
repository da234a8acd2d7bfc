#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace hwnroute::dqn {

struct Experience {
  std::vector<double> features;
  int action = 0;       // slot index of the chosen neighbor
  int resource = 0;
  double reward = 0.0;  // bit/s, bottleneck rate of the finished route
  std::uint64_t episode = 0;

  friend bool operator==(const Experience&, const Experience&) = default;
};

/// Fixed-capacity ring buffer; the oldest experience is overwritten first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void add(Experience e);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  const Experience& operator[](std::size_t i) const { return items_.at(i); }

  /// `batch` distinct indices drawn uniformly (Floyd's algorithm).
  std::vector<std::size_t> sample(std::size_t batch, std::mt19937_64& rng) const;

  // Persistence hooks.
  std::size_t head() const { return head_; }
  void restore(std::vector<Experience> items, std::size_t head);
  const std::vector<Experience>& items() const { return items_; }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Experience> items_;
};

}  // namespace hwnroute::dqn
