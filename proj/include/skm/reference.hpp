#ifndef SKM_REFERENCE_HPP
#define SKM_REFERENCE_HPP

#include <cstdint>
#include <span>

#include "skm/core.hpp"

// Plain serial loops, kept as the reference implementation for the chunked
// OpenMP kernels. Used by the unit tests and by skm-kernel-bench; production
// code paths never call these.
namespace skm::reference {

void nearest_assign(const PointSet& points, const PointSet& centroids,
                    std::int32_t* labels_out, double* sqdist_out);

double weighted_sum(std::span<const double> values, const double* weights);

void cluster_accumulate(const PointSet& points, const double* weights,
                        std::span<const std::int32_t> labels, std::size_t k,
                        std::span<double> sums_out, std::span<double> masses_out);

double kmeans_error(const PointSet& points, const PointSet& centroids);

}  // namespace skm::reference

#endif  // SKM_REFERENCE_HPP
