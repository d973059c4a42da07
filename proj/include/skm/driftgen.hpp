#ifndef SKM_DRIFTGEN_HPP
#define SKM_DRIFTGEN_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "skm/core.hpp"
#include "skm/lloyd.hpp"
#include "skm/rng.hpp"

namespace skm {

// Base data for a stream: a synthetic Gaussian mixture or an ingested CSV.
struct BaseDataSpec {
  enum class Kind { GaussianMixture, CsvFile };
  Kind kind = Kind::GaussianMixture;
  std::size_t d = 2;
  std::size_t n = 4000;
  std::size_t k_true = 5;
  std::string csv_path;    // CsvFile only
  bool csv_header = false; // skip one leading line
};

// Gaussian case: k_true isotropic unit-variance components, means uniform in
// [-10, 10]^d, equal mixing. CSV case: parsed numeric rows (n/d/k_true ignored).
PointSet gen_base(const BaseDataSpec& spec, Rng& rng);

// Uniform direction on the sphere (normalized Gaussian vector); |xi| = 1.
Point random_unit_vector(std::size_t d, Rng& rng);

// alpha_1 = sqrt(eps * e_prev / (k * n_points)); requires e_prev > 0.
double initial_alpha(double epsilon, double e_prev, std::size_t k,
                     std::size_t n_points);

// The current concept: its point pool, id, and the reference centroids
// C_{i-1} the next drift is calibrated against.
struct ConceptPool {
  PointSet points;
  std::int64_t concept_id = 0;
  CentroidSet reference_centroids;
};

class DriftCalibrationError : public std::runtime_error {
 public:
  DriftCalibrationError(const std::string& msg, double alpha, double ratio)
      : std::runtime_error(msg), best_alpha(alpha), best_ratio(ratio) {}
  double best_alpha;
  double best_ratio;  // achieved E(X_i,C_{i-1}) / E(X_{i-1},C_{i-1})
};

struct DriftResult {
  ConceptPool pool;
  double achieved_ratio = 0.0;  // target is (1 + epsilon), within 5%
  int alpha_iterations = 0;
};

// Applies a (1+eps)-drift: each reference cluster is rigidly translated by
// alpha * xi_k along its own random unit direction; alpha is calibrated by the
// fixed-step update until the error against the reference centroids lands
// within 5% of (1+eps) times the pre-drift error (cap 50 iterations, failure
// raises DriftCalibrationError with the best alpha found). The returned pool
// has its reference centroids re-fit by Lloyd.
DriftResult drift_translate(const ConceptPool& pool, double epsilon, Rng& rng,
                            const SolverConfig& solver = {});

struct DriftStreamSpec {
  BaseDataSpec base;
  double epsilon = 1.0;
  std::size_t batch_size = 500;
  int drift_period = 10;
  std::size_t k_cluster = 5;  // K for the reference centroids
  std::uint64_t seed = 1;
  int warmup = -1;  // batches before the first drift; -1 means drift_period
};

// Controlled (1+eps)-drift stream: batches are uniform with-replacement draws
// from the frozen concept pool; a drift is applied first on every period
// boundary after the warmup.
class DriftStream {
 public:
  explicit DriftStream(const DriftStreamSpec& spec);

  std::pair<Batch, std::int64_t> next();  // (batch, concept id)

  const ConceptPool& pool() const { return pool_; }
  const std::vector<double>& drift_ratios() const { return ratios_; }
  std::int64_t batches_emitted() const { return batch_index_; }

 private:
  DriftStreamSpec spec_;
  SolverConfig solver_;
  Rng rng_;
  ConceptPool pool_;
  std::int64_t batch_index_ = 0;
  int warmup_ = 0;
  std::vector<double> ratios_;
};

}  // namespace skm

#endif  // SKM_DRIFTGEN_HPP
