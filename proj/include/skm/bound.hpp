#ifndef SKM_BOUND_HPP
#define SKM_BOUND_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "skm/core.hpp"
#include "skm/driftgen.hpp"

namespace skm {

struct BoundParams {
  double rho = 0.5;       // forgetting parameter, in (0, 1)
  int t = 1;              // batches since the drift
  std::size_t n = 1;      // batch size
  double delta = 0.05;    // confidence, in (0, 1)
  double b = 1.0;         // upper bound on the squared distance to c
  double epsilon = 0.0;   // drift magnitude
  double e = 0.0;         // pre-drift expected squared distance
};

// Confidence half-width
//   e = b * sqrt( [ (2 rho^T - 1)/T + (1 - rho)/(1 + rho) ] / (2N) * ln(2/delta) ).
// A negative radicand (possible only for extreme rho/T combinations) raises
// std::domain_error carrying the offending parameters; it is never clamped.
double bound_e(const BoundParams& p);

// The (1-delta) interval for E_* - E_rho: center rho^T * eps * E, half-width
// bound_e. Returned as (low, high).
std::pair<double, double> interval(const BoundParams& p);

struct Theorem1Config {
  BaseDataSpec base{BaseDataSpec::Kind::GaussianMixture, 2, 20000, 5, "", false};
  // K for the drift calibration. 1 makes the reference centroid coincide with
  // the first concept's center of mass, so the generator's epsilon is realized
  // for the single test centroid directly.
  std::size_t k_cluster = 1;
  double epsilon = 0.5;
  std::size_t batch_n = 1000;
  double rho = 0.676;
  double delta = 0.05;
  int repetitions = 200;
  int old_batches = 40;
  int new_batches = 20;
  std::uint64_t seed = 1;
  Exec exec = Exec::Parallel;
};

struct CoverageRow {
  int t = 0;
  double coverage = 0.0;   // fraction of repetitions inside the interval
  double mean_diff = 0.0;  // mean of E_* - E_rho over repetitions
  double center = 0.0;     // rho^T * eps_emp * E_emp
  double e_halfwidth = 0.0;
};

struct CoverageReport {
  std::vector<CoverageRow> rows;     // one per T = 1..new_batches
  double empirical_epsilon = 0.0;    // measured against the single centroid c
  double empirical_e = 0.0;          // mean squared distance of the old pool to c
  double b = 0.0;                    // max squared distance over both pools
};

// Monte-Carlo check of the interval: both concept pools are generated once
// (old pool, then one calibrated drift); c is the old pool's center of mass
// and b the farthest squared distance in the realized data. Each repetition
// draws old_batches old-concept batches and then new-concept batches one at a
// time, checking E_* - E_rho against the interval at every T.
CoverageReport verify_theorem1(const Theorem1Config& cfg);

}  // namespace skm

#endif  // SKM_BOUND_HPP
