#ifndef SKM_WINDOW_HPP
#define SKM_WINDOW_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "skm/core.hpp"

namespace skm {

// A stored batch plus its per-point centroid labels from the last converged
// solve (empty until the batch has been through a solver).
struct StoredBatch {
  Batch batch;
  std::vector<std::int32_t> labels;
};

// The retained, exponentially weighted suffix of the stream. Entry index ==
// antiquity: entries()[0] is the newest batch (weight rho^0), entries()[t]
// carries weight rho^t.
class BatchWindow {
 public:
  static constexpr std::size_t kUnbounded =
      std::numeric_limits<std::size_t>::max();

  BatchWindow() = default;
  BatchWindow(double rho, std::size_t t_max);

  double rho() const { return rho_; }
  std::size_t t_max() const { return t_max_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool at_capacity() const { return entries_.size() >= t_max_; }

  const StoredBatch& entry(std::size_t t) const { return entries_[t]; }
  StoredBatch& entry(std::size_t t) { return entries_[t]; }

  // Shifts every stored antiquity up by one and inserts b at antiquity 0.
  // Throws if already at capacity (callers evict first).
  void append_newest(Batch b);
  void evict_oldest();
  void clear() { entries_.clear(); }

  std::size_t total_points() const;
  // M_X = sum_t rho^t |B^t|, recomputed from scratch.
  double mass() const;
  // rho^t for t = 0..size()-1, built by iterated multiplication.
  std::vector<double> batch_weights() const;

  // Smallest T with rho^T < 1e-3 (the negligible-weight retention rule),
  // capped at 1000; rho == 1 returns the cap.
  static std::size_t default_t_max(double rho);

 private:
  std::vector<StoredBatch> entries_;
  double rho_ = 1.0;
  std::size_t t_max_ = kUnbounded;
};

}  // namespace skm

#endif  // SKM_WINDOW_HPP
