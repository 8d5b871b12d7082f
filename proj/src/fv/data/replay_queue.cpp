#include "fv/data/replay_queue.hpp"

#include "fv/data/divergence.hpp"

namespace fv::data {

void ReplayQueue::insert(const Dataset& batch, int round) {
  entries_.reserve(entries_.size() + batch.frames.size());
  for (const Frame& f : batch.frames) entries_.push_back({f, round});
}

Dataset ReplayQueue::evict() {
  Dataset removed;
  while (entries_.size() > capacity_) {
    std::vector<size_t> counts(static_cast<size_t>(class_count_), 0);
    for (const Entry& e : entries_) counts[e.frame.label] += 1;
    // Class with the largest excess over the uniform share; counts stand in
    // for frequencies since the total is fixed. Ties break to the lowest
    // ordinal.
    size_t victim_class = 0;
    for (size_t c = 1; c < counts.size(); ++c) {
      if (counts[c] > counts[victim_class]) victim_class = c;
    }
    // Oldest frame of that class (entries are FIFO-ordered).
    for (size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].frame.label == victim_class) {
        removed.frames.push_back(std::move(entries_[i].frame));
        entries_.erase(entries_.begin() + static_cast<long>(i));
        break;
      }
    }
  }
  return removed;
}

Dataset ReplayQueue::contents() const {
  Dataset out;
  out.frames.reserve(entries_.size());
  for (const Entry& e : entries_) out.frames.push_back(e.frame);
  return out;
}

std::vector<uint8_t> ReplayQueue::labels() const {
  std::vector<uint8_t> out;
  out.reserve(entries_.size());
  for (const Entry& e : entries_) out.push_back(e.frame.label);
  return out;
}

std::vector<double> ReplayQueue::stored_distribution() const {
  if (entries_.empty()) return uniform_distribution(class_count_);
  return label_distribution(labels(), class_count_);
}

double ReplayQueue::uniformity_gap_to_uniform() const {
  return uniformity_gap(stored_distribution());
}

bool ReplayQueue::within_uniform_tolerance(double kappa) const {
  return uniformity_gap_to_uniform() <= kappa;
}

}  // namespace fv::data
