#include "skm/kernels.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace skm::kernels {
namespace {

// Shared by both execution modes so the arithmetic is identical bit for bit.
void assign_chunk(const double* pts, const double* cents, std::size_t begin,
                  std::size_t end, std::size_t k, std::size_t d,
                  std::int32_t* labels, double* sqd) {
  for (std::size_t i = begin; i < end; ++i) {
    const double* x = pts + i * d;
    double best = std::numeric_limits<double>::infinity();
    std::int32_t best_k = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const double* ck = cents + c * d;
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
    labels[i] = best_k;
    if (sqd != nullptr) sqd[i] = best;
  }
}

double sum_chunk(const double* values, const double* weights, std::size_t begin,
                 std::size_t end) {
  double acc = 0.0;
  if (weights == nullptr) {
    for (std::size_t i = begin; i < end; ++i) acc += values[i];
  } else {
    for (std::size_t i = begin; i < end; ++i) acc += weights[i] * values[i];
  }
  return acc;
}

void accumulate_chunk(const double* pts, const double* weights,
                      const std::int32_t* labels, std::size_t begin,
                      std::size_t end, std::size_t d, double* sums,
                      double* masses) {
  for (std::size_t i = begin; i < end; ++i) {
    const double w = weights == nullptr ? 1.0 : weights[i];
    const auto c = static_cast<std::size_t>(labels[i]);
    const double* x = pts + i * d;
    double* s = sums + c * d;
    for (std::size_t j = 0; j < d; ++j) s[j] += w * x[j];
    masses[c] += w;
  }
}

std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

}  // namespace

void nearest_assign(const PointSet& points, const PointSet& centroids,
                    std::int32_t* labels_out, double* sqdist_out,
                    DistanceCounter& counter, Exec exec) {
  if (points.empty()) throw std::invalid_argument("nearest_assign: empty point set");
  if (centroids.empty()) throw std::invalid_argument("nearest_assign: empty centroid set");
  if (points.dim() != centroids.dim())
    throw std::invalid_argument("nearest_assign: dimension mismatch");

  const std::size_t n = points.size();
  const std::size_t k = centroids.size();
  const std::size_t d = points.dim();
  const auto nchunks = static_cast<std::int64_t>(chunk_count(n));
  const bool par = exec == Exec::Parallel;

#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t end = std::min(begin + kChunk, n);
    assign_chunk(points.data(), centroids.data(), begin, end, k, d, labels_out,
                 sqdist_out);
  }
  counter.add(static_cast<std::uint64_t>(n) * k);
}

double chunked_sum(std::span<const double> values, const double* weights,
                   Exec exec) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  const std::size_t nc = chunk_count(n);
  std::vector<double> partial(nc, 0.0);
  const bool par = exec == Exec::Parallel;

#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(nc); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t end = std::min(begin + kChunk, n);
    partial[static_cast<std::size_t>(c)] =
        sum_chunk(values.data(), weights, begin, end);
  }
  double total = 0.0;
  for (const double p : partial) total += p;
  return total;
}

void cluster_accumulate(const PointSet& points, const double* weights,
                        std::span<const std::int32_t> labels, std::size_t k,
                        std::span<double> sums_out, std::span<double> masses_out,
                        Exec exec) {
  const std::size_t n = points.size();
  const std::size_t d = points.dim();
  if (labels.size() != n) throw std::invalid_argument("cluster_accumulate: label size mismatch");
  if (sums_out.size() != k * d || masses_out.size() != k)
    throw std::invalid_argument("cluster_accumulate: output size mismatch");

  const std::size_t nc = chunk_count(n);
  std::vector<double> chunk_sums(nc * k * d, 0.0);
  std::vector<double> chunk_masses(nc * k, 0.0);
  const bool par = exec == Exec::Parallel;

#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(nc); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t end = std::min(begin + kChunk, n);
    accumulate_chunk(points.data(), weights, labels.data(), begin, end, d,
                     chunk_sums.data() + static_cast<std::size_t>(c) * k * d,
                     chunk_masses.data() + static_cast<std::size_t>(c) * k);
  }

  std::fill(sums_out.begin(), sums_out.end(), 0.0);
  std::fill(masses_out.begin(), masses_out.end(), 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    const double* cs = chunk_sums.data() + c * k * d;
    const double* cm = chunk_masses.data() + c * k;
    for (std::size_t j = 0; j < k * d; ++j) sums_out[j] += cs[j];
    for (std::size_t j = 0; j < k; ++j) masses_out[j] += cm[j];
  }
}

}  // namespace skm::kernels
