#ifndef SKM_STREAMING_HPP
#define SKM_STREAMING_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "skm/core.hpp"
#include "skm/lloyd.hpp"
#include "skm/lsap.hpp"
#include "skm/rng.hpp"
#include "skm/window.hpp"

namespace skm {

// The four FSKM initialization strategies.
enum class InitializerKind { Upc, Icb, Wki, Hi };

// Single-owner state of one stream. The window entries carry the per-batch
// labels of the last converged solve; centroids is C* with the converged
// per-cluster masses as weights.
struct StreamState {
  BatchWindow window;
  CentroidSet centroids;

  bool initialized() const { return centroids.size() > 0; }
};

inline StreamState make_fskm_state(double rho, std::size_t t_max) {
  return StreamState{BatchWindow(rho, t_max), {}};
}
// PSKM keeps every batch since the last known drift, unweighted.
inline StreamState make_pskm_state() {
  return StreamState{BatchWindow(1.0, BatchWindow::kUnbounded), {}};
}

struct StepConfig {
  std::size_t k = 0;
  SolverConfig solver;
};

struct StepMetrics {
  double initial_error = 0.0;    // objective at the initial centroids
  double converged_error = 0.0;  // objective at the fixed point
  int iterations = 0;
  std::uint64_t distances = 0;   // distance evaluations spent by the step
};

// rho solving eps * rho^(tau/m) = 0.01; requires eps > 0.01.
double rho_from(double epsilon, int m, int tau);

// Surrogate error E_rho: exponentially weighted mean squared nearest-centroid
// distance over the window, normalized by the window mass M_X.
double surrogate_error(const BatchWindow& window, const CentroidSet& c,
                       DistanceCounter& counter, Exec exec = Exec::Parallel);
// Same, with an explicit rho (e.g. scoring a PSKM window under the run's rho).
double surrogate_error_with_rho(const BatchWindow& window, double rho,
                                const CentroidSet& c, DistanceCounter& counter,
                                Exec exec = Exec::Parallel);

// SKM error E_*: plain pooled K-means error over the same-concept batches.
double skm_error(std::span<const Batch> batches_since_drift,
                 const CentroidSet& c, DistanceCounter& counter,
                 Exec exec = Exec::Parallel);

// UPC: reuse the previously converged centroids; zero distance evaluations.
CentroidSet init_upc(const StreamState& state);

// ICB: KM++ over the newest batch only. labels_out receives the partition of
// the batch under the returned centers (P^0).
CentroidSet init_icb(const Batch& new_batch, std::size_t k, Rng& rng,
                     DistanceCounter& counter,
                     std::vector<std::int32_t>* labels_out = nullptr);

// (w*_k, w0_k): w*_k = sum_{t>=1} rho^t |B^t ∩ P*_k| from the stored labels,
// w0_k = |B^0 ∩ P0_k| from zero_labels.
std::pair<std::vector<double>, std::vector<double>> centroid_weights(
    const BatchWindow& window, std::span<const std::int32_t> zero_labels,
    std::size_t k);

// WKI: weighted K-means over the 2K weighted points {c*_k: w*_k} u {c0_k: w0_k}
// (zero-weight entries dropped; if fewer than K remain the dropped entries pad
// the result in stable order). Seeded by weighted KM++.
CentroidSet init_wki(const BatchWindow& window, const CentroidSet& c_star,
                     const CentroidSet& c_zero,
                     std::span<const std::int32_t> zero_labels,
                     const SolverConfig& solver, Rng& rng,
                     DistanceCounter& counter);

// Upper-bound functional f^rho(X, C) of the surrogate (without the constant).
double upper_bound_f(const BatchWindow& window, const CentroidSet& c,
                     const CentroidSet& c_star, const CentroidSet& c_zero,
                     std::span<const double> w_star,
                     std::span<const double> w_zero, DistanceCounter& counter);

// The C-independent constant completing E_rho <= f^rho + const: the weighted
// within-cluster scatter of the window about (C*, C0) under the stored labels
// (t >= 1) and zero_labels (t = 0).
double upper_bound_const(const BatchWindow& window, const CentroidSet& c_star,
                         const CentroidSet& c_zero,
                         std::span<const std::int32_t> zero_labels,
                         DistanceCounter& counter);

// f_{k,k'} = (w*_k w0_{k'} / (w*_k + w0_{k'})) |c*_k - c0_{k'}|^2, with zero
// entries when either weight vanishes (the harmonic-mean limit).
CostMatrix hi_cost_matrix(const CentroidSet& c_star, const CentroidSet& c_zero,
                          std::span<const double> w_star,
                          std::span<const double> w_zero,
                          DistanceCounter& counter);

// HI: optimal pairing via the linear sum assignment over hi_cost_matrix, then
// per-pair weighted merge c_k = (w*_k c*_k + w0_s c0_s) / (w*_k + w0_s).
// A zero-weight pair merges to c0_s (fresh information wins).
CentroidSet init_hi(const BatchWindow& window, const CentroidSet& c_star,
                    const CentroidSet& c_zero,
                    std::span<const std::int32_t> zero_labels,
                    DistanceCounter& counter);

// One FSKM step: evict at T_max, append the batch at antiquity 0, initialize
// per `kind`, then weighted Lloyd over the window. Never consumes drift
// knowledge. An uninitialized state is bootstrapped with KM++ on the batch
// regardless of `kind`.
StepMetrics fskm_step(StreamState& state, Batch new_batch, InitializerKind kind,
                      const StepConfig& cfg, Rng& rng, DistanceCounter& counter);

// One PSKM step: on drift the stored batches are cleared and the centroids
// reseeded with KM++ on the new batch; then (unweighted) Lloyd over the pool.
StepMetrics pskm_step(StreamState& state, Batch new_batch, bool drift_occurred,
                      const StepConfig& cfg, Rng& rng, DistanceCounter& counter);

}  // namespace skm

#endif  // SKM_STREAMING_HPP
