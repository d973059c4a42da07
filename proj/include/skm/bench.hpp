#ifndef SKM_BENCH_HPP
#define SKM_BENCH_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skm/core.hpp"
#include "skm/driftgen.hpp"
#include "skm/lloyd.hpp"

namespace skm {

enum class Algo { Pskm, FskmUpc, FskmIcb, FskmWki, FskmHi };

inline constexpr Algo kAllAlgos[] = {Algo::Pskm, Algo::FskmUpc, Algo::FskmIcb,
                                     Algo::FskmWki, Algo::FskmHi};

std::string_view algo_id(Algo a);
std::optional<Algo> algo_from_id(std::string_view id);

struct ExperimentConfig {
  std::size_t d = 2;
  std::size_t pool_n = 4000;
  std::size_t k_true = 0;  // mixture components of the base data; 0 means k
  double epsilon = 1.0;    // drift magnitude, in {0.5, 1, 2} for the paper grid
  std::size_t batch_size = 500;
  int tau = 10;            // drift period (batches per concept)
  std::size_t k = 5;       // clusters
  int m = 2;               // rho = rho_from(epsilon, m, tau)
  std::size_t t_max = 0;   // retained batches; 0 derives from rho
  SolverConfig solver;
  int repetitions = 3;
  std::vector<Algo> algorithms;  // empty means all five
  std::uint64_t seed = 1;
  int measured_batches = 100;
  int jobs = 0;  // worker cap for the repetition loop; 0 = OpenMP default
};

struct ExperimentRecord {
  Algo algo = Algo::Pskm;
  double eps = 0.0;
  std::size_t k = 0;
  int m = 0;
  double rho = 0.0;
  int rep = 0;
  int global_batch = 0;      // 1..measured_batches
  int batch_in_concept = 0;  // 1..tau
  // For FSKM these are the initial/converged surrogate; for PSKM its own
  // pooled objective (rho = 1), which coincides with the SKM error.
  double init_surr = 0.0;
  double conv_surr = 0.0;
  double conv_skm = 0.0;  // scored against the pooled same-concept batches
  std::uint64_t distances = 0;
  int iterations = 0;
};

// The streamed protocol: burn-in of t_max same-concept batches, then
// measured_batches with a drift first on every tau-th batch. Every algorithm
// consumes byte-identical batches and a per-step generator seeded from
// (rep, global batch), so runs are reproducible and fair. If a repetition
// fails, the completed repetitions' records are flushed into partial_sink
// (when given) before the error propagates.
std::vector<ExperimentRecord> run_experiment(
    const ExperimentConfig& cfg,
    std::vector<ExperimentRecord>* partial_sink = nullptr);

// Same protocol over a pre-generated batch sequence with its concept tags
// (e.g. a loaded stream dump). Every repetition replays the same batches.
std::vector<ExperimentRecord> run_experiment_on_stream(
    const ExperimentConfig& cfg, std::span<const Batch> batches,
    std::span<const std::int64_t> concept_ids,
    std::vector<ExperimentRecord>* partial_sink = nullptr);

// Per-batch normalized scores: e_* = (E - min)/min over the group's
// algorithms, d_hat = D / min D. A zero minimum flags that metric unnormalized.
struct NormalizedRecord {
  Algo algo = Algo::Pskm;
  double eps = 0.0;
  std::size_t k = 0;
  int m = 0;
  int rep = 0;
  int global_batch = 0;
  int batch_in_concept = 0;
  double e_init = 0.0;
  double e_conv = 0.0;
  double e_skm = 0.0;
  double d_hat = 0.0;
  bool flag_init = false, flag_conv = false, flag_skm = false, flag_dist = false;
};

// One group = the records of all algorithms for one (eps, K, m, rep, batch).
std::vector<NormalizedRecord> normalize_scores(
    std::span<const ExperimentRecord> group);

// Groups arbitrary record collections by (eps, K, m, rep, global_batch) and
// normalizes each group. Groups with fewer than two algorithms are rejected.
std::vector<NormalizedRecord> normalize_all(
    std::span<const ExperimentRecord> records);

struct SummaryRow {
  Algo algo = Algo::Pskm;
  double eps = 0.0;
  std::size_t k = 0;
  int m = 0;
  int batch_index = 0;
  std::string metric;  // init_surr | conv_surr | conv_skm | distances
  double median = 0.0, q1 = 0.0, q3 = 0.0;
};

// Medians and quartiles (linear interpolation between closest ranks) of the
// normalized scores per (algorithm, eps, K, m, batch index, metric), for the
// requested batch indices. Flagged metric values are excluded.
std::vector<SummaryRow> aggregate(std::span<const ExperimentRecord> records,
                                  const std::set<int>& batch_indices);

// R-7 quantile of an unsorted sample (helper shared with the tests).
double quantile(std::vector<double> values, double q);

}  // namespace skm

#endif  // SKM_BENCH_HPP
