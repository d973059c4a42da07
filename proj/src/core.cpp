#include "skm/core.hpp"

#include <cmath>

#include "skm/kernels.hpp"

namespace skm {

PointSet PointSet::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  PointSet out;
  for (const auto& r : rows) {
    if (out.dim_ == 0) out.dim_ = r.size();
    if (r.size() != out.dim_)
      throw std::invalid_argument("PointSet::from_rows: ragged rows");
    out.data_.insert(out.data_.end(), r.begin(), r.end());
  }
  return out;
}

void PointSet::push_row(std::span<const double> p) {
  if (dim_ == 0) dim_ = p.size();
  if (p.size() != dim_)
    throw std::invalid_argument("PointSet::push_row: dimension mismatch");
  data_.insert(data_.end(), p.begin(), p.end());
}

void PointSet::append(const PointSet& other) {
  if (other.empty()) return;
  if (dim_ == 0) dim_ = other.dim_;
  if (other.dim_ != dim_)
    throw std::invalid_argument("PointSet::append: dimension mismatch");
  data_.insert(data_.end(), other.data_.begin(), other.data_.end());
}

double sq_dist(std::span<const double> a, std::span<const double> b,
               DistanceCounter& counter) {
  if (a.size() != b.size())
    throw std::invalid_argument("sq_dist: dimension mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    acc += diff * diff;
  }
  counter.add(1);
  return acc;
}

Partition assign(const PointSet& points, const CentroidSet& c,
                 DistanceCounter& counter, Exec exec) {
  if (points.empty()) throw std::invalid_argument("assign: empty point set");
  if (c.size() == 0) throw std::invalid_argument("assign: empty centroid set");
  Partition labels(points.size());
  kernels::nearest_assign(points, c.centroids, labels.data(), nullptr, counter,
                          exec);
  return labels;
}

double kmeans_error(const PointSet& points, const CentroidSet& c,
                    DistanceCounter& counter, Exec exec) {
  if (points.empty()) throw std::invalid_argument("kmeans_error: empty point set");
  if (c.size() == 0) throw std::invalid_argument("kmeans_error: empty centroid set");
  std::vector<std::int32_t> labels(points.size());
  std::vector<double> sqd(points.size());
  kernels::nearest_assign(points, c.centroids, labels.data(), sqd.data(),
                          counter, exec);
  return kernels::chunked_sum(sqd, nullptr, exec) /
         static_cast<double>(points.size());
}

Point weighted_mean(const PointSet& points, std::span<const double> weights) {
  if (points.empty()) throw std::invalid_argument("weighted_mean: empty point set");
  if (weights.size() != points.size())
    throw std::invalid_argument("weighted_mean: weight count mismatch");
  const std::size_t d = points.dim();
  Point mean(d, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w = weights[i];
    if (w < 0.0) throw std::invalid_argument("weighted_mean: negative weight");
    const double* x = points.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) mean[j] += w * x[j];
    total += w;
  }
  if (total <= 0.0)
    throw std::invalid_argument("weighted_mean: degenerate cluster, zero total weight");
  for (double& v : mean) v /= total;
  return mean;
}

std::pair<double, double> scatter_identity_check(const PointSet& points,
                                                 std::span<const double> weights,
                                                 std::span<const double> c) {
  if (points.empty())
    throw std::invalid_argument("scatter_identity_check: empty point set");
  if (points.dim() != c.size())
    throw std::invalid_argument("scatter_identity_check: dimension mismatch");
  const std::size_t n = points.size();
  const std::size_t d = points.dim();

  std::vector<double> unit;
  if (weights.empty()) {
    unit.assign(n, 1.0);
    weights = unit;
  }
  const Point mean = weighted_mean(points, weights);

  double lhs = 0.0, scatter = 0.0, total_w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = points.data() + i * d;
    double to_c = 0.0, to_mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double dc = x[j] - c[j];
      const double dm = x[j] - mean[j];
      to_c += dc * dc;
      to_mean += dm * dm;
    }
    lhs += weights[i] * to_c;
    scatter += weights[i] * to_mean;
    total_w += weights[i];
  }
  double mean_to_c = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = mean[j] - c[j];
    mean_to_c += diff * diff;
  }
  return {lhs, scatter + total_w * mean_to_c};
}

}  // namespace skm
