#include "skm/window.hpp"

#include <stdexcept>
#include <utility>

namespace skm {

BatchWindow::BatchWindow(double rho, std::size_t t_max)
    : rho_(rho), t_max_(t_max) {
  if (!(rho > 0.0) || rho > 1.0)
    throw std::invalid_argument("BatchWindow: rho must be in (0, 1]");
  if (t_max < 1) throw std::invalid_argument("BatchWindow: t_max must be >= 1");
}

void BatchWindow::append_newest(Batch b) {
  if (at_capacity())
    throw std::invalid_argument("BatchWindow: append past capacity, evict first");
  if (b.points.empty())
    throw std::invalid_argument("BatchWindow: empty batch");
  for (auto& e : entries_) ++e.batch.antiquity;
  b.antiquity = 0;
  entries_.insert(entries_.begin(), StoredBatch{std::move(b), {}});
}

void BatchWindow::evict_oldest() {
  if (entries_.empty())
    throw std::invalid_argument("BatchWindow: evict on empty window");
  entries_.pop_back();
}

std::size_t BatchWindow::total_points() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.batch.points.size();
  return n;
}

double BatchWindow::mass() const {
  double m = 0.0, w = 1.0;
  for (const auto& e : entries_) {
    m += w * static_cast<double>(e.batch.points.size());
    w *= rho_;
  }
  return m;
}

std::vector<double> BatchWindow::batch_weights() const {
  std::vector<double> out(entries_.size());
  double w = 1.0;
  for (std::size_t t = 0; t < entries_.size(); ++t) {
    out[t] = w;
    w *= rho_;
  }
  return out;
}

std::size_t BatchWindow::default_t_max(double rho) {
  constexpr std::size_t kCap = 1000;
  double w = 1.0;
  for (std::size_t t = 1; t <= kCap; ++t) {
    w *= rho;
    if (w < 1e-3) return t;
  }
  return kCap;
}

}  // namespace skm
