#include "skm/reference.hpp"

#include <algorithm>
#include <limits>

namespace skm::reference {

void nearest_assign(const PointSet& points, const PointSet& centroids,
                    std::int32_t* labels_out, double* sqdist_out) {
  const std::size_t n = points.size();
  const std::size_t k = centroids.size();
  const std::size_t d = points.dim();
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = points.data() + i * d;
    double best = std::numeric_limits<double>::infinity();
    std::int32_t best_k = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const double* ck = centroids.data() + c * d;
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = x[j] - ck[j];
        acc += diff * diff;
      }
      if (acc < best) {
        best = acc;
        best_k = static_cast<std::int32_t>(c);
      }
    }
    labels_out[i] = best_k;
    if (sqdist_out != nullptr) sqdist_out[i] = best;
  }
}

double weighted_sum(std::span<const double> values, const double* weights) {
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    acc += (weights == nullptr ? 1.0 : weights[i]) * values[i];
  return acc;
}

void cluster_accumulate(const PointSet& points, const double* weights,
                        std::span<const std::int32_t> labels, std::size_t k,
                        std::span<double> sums_out, std::span<double> masses_out) {
  const std::size_t d = points.dim();
  std::fill(sums_out.begin(), sums_out.end(), 0.0);
  std::fill(masses_out.begin(), masses_out.end(), 0.0);
  (void)k;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w = weights == nullptr ? 1.0 : weights[i];
    const auto c = static_cast<std::size_t>(labels[i]);
    const double* x = points.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) sums_out[c * d + j] += w * x[j];
    masses_out[c] += w;
  }
}

double kmeans_error(const PointSet& points, const PointSet& centroids) {
  std::vector<std::int32_t> labels(points.size());
  std::vector<double> sqd(points.size());
  nearest_assign(points, centroids, labels.data(), sqd.data());
  return weighted_sum(sqd, nullptr) / static_cast<double>(points.size());
}

}  // namespace skm::reference
