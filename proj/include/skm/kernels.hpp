#ifndef SKM_KERNELS_HPP
#define SKM_KERNELS_HPP

#include <cstdint>
#include <span>

#include "skm/core.hpp"

namespace skm::kernels {

// Points per reduction chunk. All floating-point reductions are computed as
// per-chunk partial results combined in ascending chunk order, so the bits of
// the result depend only on the chunk grid, never on the thread count.
inline constexpr std::size_t kChunk = 1024;

// Nearest-centroid labels; ties break to the lowest centroid index.
// If sqdist_out is non-null (size n), each point's squared distance to its
// label centroid is written too. Adds n * K to the counter.
void nearest_assign(const PointSet& points, const PointSet& centroids,
                    std::int32_t* labels_out, double* sqdist_out,
                    DistanceCounter& counter, Exec exec);

// Chunk-deterministic sum of values[i] (times weights[i] when non-null).
double chunked_sum(std::span<const double> values, const double* weights,
                   Exec exec);

// Per-cluster weighted coordinate sums and masses. weights may be null (unit
// weights). sums_out (k * d) and masses_out (k) are overwritten.
void cluster_accumulate(const PointSet& points, const double* weights,
                        std::span<const std::int32_t> labels, std::size_t k,
                        std::span<double> sums_out, std::span<double> masses_out,
                        Exec exec);

}  // namespace skm::kernels

#endif  // SKM_KERNELS_HPP
