#pragma once

#include <cstddef>
#include <vector>

#include "attacksim/errors.hpp"
#include "attacksim/rng.hpp"

namespace attacksim {

// One stored environment transition, with states already vectorized
// for the value network.
struct Transition {
  std::vector<float> state;
  int action = 0;
  float reward = 0.0f;
  std::vector<float> next_state;
  bool done = false;

  bool operator==(const Transition&) const = default;
};

// Fixed-capacity ring buffer with strictly oldest-first eviction.
// at(0) is always the oldest surviving element.
template <typename T>
class RingBuffer {
 public:
  explicit RingBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw Error("ring buffer: capacity must be positive");
    items_.reserve(capacity);
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return items_.size(); }
  bool full() const { return items_.size() == capacity_; }

  void push(T item) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
    } else {
      items_[head_] = std::move(item);
      head_ = (head_ + 1) % capacity_;
    }
  }

  const T& at(std::size_t i) const {
    if (i >= items_.size()) throw Error("ring buffer: index out of range");
    return items_[(head_ + i) % items_.size()];
  }

  // `count` slot indices drawn uniformly with replacement.
  std::vector<std::size_t> sample_indices(Rng& rng, std::size_t count) const {
    if (items_.empty()) throw Error("ring buffer: sampling from empty buffer");
    std::vector<std::size_t> out(count);
    for (std::size_t& i : out) i = uniform_index(rng, items_.size());
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // position of the oldest element once full
  std::vector<T> items_;
};

using ReplayBuffer = RingBuffer<Transition>;

}  // namespace attacksim
