#pragma once

#include <cstddef>
#include <vector>

#include "fv/data/dataset.hpp"

namespace fv::data {

// Per-client FIFO store with class-aware eviction. Entries keep their
// insertion round; eviction removes from over-represented classes, oldest
// frame first, until the sample count is back under capacity.
class ReplayQueue {
 public:
  ReplayQueue(size_t capacity, int class_count)
      : capacity_(capacity), class_count_(class_count) {}

  size_t capacity() const { return capacity_; }
  size_t size() const { return entries_.size(); }
  int class_count() const { return class_count_; }

  // Appends the batch in order; never evicts.
  void insert(const Dataset& batch, int round);

  // While over capacity, removes the oldest frame of the class whose stored
  // frequency most exceeds the uniform target (ties: lowest ordinal, then
  // oldest frame). Returns the removed frames in removal order.
  Dataset evict();

  // FIFO-ordered snapshot copy.
  Dataset contents() const;

  std::vector<uint8_t> labels() const;
  std::vector<double> stored_distribution() const;  // empty queue -> uniform
  double uniformity_gap_to_uniform() const;
  bool within_uniform_tolerance(double kappa = 0.05) const;

 private:
  struct Entry {
    Frame frame;
    int round;
  };
  size_t capacity_;
  int class_count_;
  std::vector<Entry> entries_;  // FIFO: front oldest
};

}  // namespace fv::data
