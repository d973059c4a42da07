#ifndef SKM_LLOYD_HPP
#define SKM_LLOYD_HPP

#include <cstdint>
#include <vector>

#include "skm/core.hpp"
#include "skm/rng.hpp"
#include "skm/window.hpp"

namespace skm {

struct SolverConfig {
  int max_iterations = 100;
  std::uint64_t seed = 0;
  Exec exec = Exec::Parallel;
};

// Positive-weight point set; zero-weight entries are dropped on construction.
struct WeightedPointSet {
  PointSet points;
  std::vector<double> weights;

  WeightedPointSet() = default;
  WeightedPointSet(const PointSet& pts, std::span<const double> w);

  std::size_t size() const { return points.size(); }
};

struct LloydResult {
  CentroidSet centroids;       // weights hold the converged per-cluster masses
  Partition labels;
  int iterations = 0;          // update+assign cycles executed
  // error_trace[0] is the objective at the initial centroids; one entry is
  // appended after every update+assign cycle. Non-increasing by construction.
  std::vector<double> error_trace;

  double initial_error() const { return error_trace.front(); }
  double converged_error() const { return error_trace.back(); }
};

// Lloyd's algorithm: alternate nearest assignment and center-of-mass update
// until the partition reaches a fixed point or max_iterations. Clusters that
// lose all mass are re-seeded at the retained point farthest from the stale
// centroid (lowest index on ties), excluding points already used for repair
// in the same pass.
LloydResult lloyd(const PointSet& points, const CentroidSet& c0,
                  const SolverConfig& cfg, DistanceCounter& counter);

// Weighted generalization: minimizes sum_i w_i |x_i - c_{x_i}|^2 / sum_i w_i.
LloydResult weighted_lloyd(const WeightedPointSet& wps, const CentroidSet& c0,
                           const SolverConfig& cfg, DistanceCounter& counter);

// Weighted Lloyd over a batch window: every point of batch B^t carries weight
// rho^t, so the objective is the surrogate error. labels are returned in flat
// window order (batch 0 first); per_batch_labels splits them back.
LloydResult batch_window_lloyd(const BatchWindow& window, const CentroidSet& c0,
                               const SolverConfig& cfg, DistanceCounter& counter);

std::vector<std::vector<std::int32_t>> per_batch_labels(const BatchWindow& window,
                                                        const Partition& flat);

// KM++ seeding: first center uniform, then D^2 sampling against the nearest
// chosen center. If labels_out is non-null it receives the nearest-center
// partition of points (one extra pass of n distance evaluations).
CentroidSet kmpp_seed(const PointSet& points, std::size_t k, Rng& rng,
                      DistanceCounter& counter,
                      std::vector<std::int32_t>* labels_out = nullptr);

// Weighted KM++: selection probabilities additionally proportional to the
// point weights (first center included).
CentroidSet weighted_kmpp_seed(const PointSet& points,
                               std::span<const double> weights, std::size_t k,
                               Rng& rng, DistanceCounter& counter);

}  // namespace skm

#endif  // SKM_LLOYD_HPP
