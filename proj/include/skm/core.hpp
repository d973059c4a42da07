#ifndef SKM_CORE_HPP
#define SKM_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace skm {

// A single d-dimensional point.
using Point = std::vector<double>;

// Per-point nearest-centroid indices.
using Partition = std::vector<std::int32_t>;

// Execution mode for the data-parallel kernels. Both modes run the same
// chunked arithmetic (see kernels.hpp), so results are bit-identical for any
// thread count; the mode only controls whether OpenMP threads are used.
enum class Exec { Serial, Parallel };

// Counts point-to-centroid distance evaluations (the D_M measurement).
// One counter per run; threads must not share a counter.
class DistanceCounter {
 public:
  void add(std::uint64_t n) { count_ += n; }
  std::uint64_t count() const { return count_; }
  void reset() { count_ = 0; }

 private:
  std::uint64_t count_ = 0;
};

// Dense row-major n x d point storage.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t n, std::size_t dim) : dim_(dim), data_(n * dim, 0.0) {}

  static PointSet from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return data_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  void push_row(std::span<const double> p);
  void append(const PointSet& other);
  void reserve_rows(std::size_t n) { data_.reserve(n * dim_); }

  const double* data() const { return data_.data(); }
  double* data() { return data_.data(); }

  bool operator==(const PointSet&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

// A timestamped batch; antiquity 0 denotes the newest batch of a window.
struct Batch {
  PointSet points;
  std::int64_t antiquity = 0;
};

// K centroids plus the per-centroid accumulated weights (w*_k / w0_k).
struct CentroidSet {
  PointSet centroids;
  std::vector<double> weights;

  CentroidSet() = default;
  explicit CentroidSet(PointSet c)
      : centroids(std::move(c)), weights(centroids.size(), 0.0) {}
  CentroidSet(PointSet c, std::vector<double> w)
      : centroids(std::move(c)), weights(std::move(w)) {
    if (weights.size() != centroids.size())
      throw std::invalid_argument("CentroidSet: weights/centroids size mismatch");
  }

  std::size_t size() const { return centroids.size(); }
  std::size_t dim() const { return centroids.dim(); }
};

// Squared Euclidean distance; adds one evaluation to the counter.
double sq_dist(std::span<const double> a, std::span<const double> b,
               DistanceCounter& counter);

// Nearest-centroid partition; ties break to the lowest centroid index.
// Adds |points| * K evaluations.
Partition assign(const PointSet& points, const CentroidSet& c,
                 DistanceCounter& counter, Exec exec = Exec::Parallel);

// Mean squared nearest-centroid distance (the K-means error).
// Adds |points| * K evaluations.
double kmeans_error(const PointSet& points, const CentroidSet& c,
                    DistanceCounter& counter, Exec exec = Exec::Parallel);

// Weighted center of mass. Throws on zero total weight (degenerate cluster).
Point weighted_mean(const PointSet& points, std::span<const double> weights);

// Both sides of the (optionally weighted) scatter identity
//   sum w |x - c|^2  ==  sum w |x - xbar|^2 + W |xbar - c|^2,
// returned as (lhs, rhs) for test use. Empty weights mean unit weights.
std::pair<double, double> scatter_identity_check(const PointSet& points,
                                                 std::span<const double> weights,
                                                 std::span<const double> c);

}  // namespace skm

#endif  // SKM_CORE_HPP
