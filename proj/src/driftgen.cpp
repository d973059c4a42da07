#include "skm/driftgen.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "skm/csvio.hpp"
#include "skm/kernels.hpp"

namespace skm {

PointSet gen_base(const BaseDataSpec& spec, Rng& rng) {
  if (spec.kind == BaseDataSpec::Kind::CsvFile) {
    std::ifstream in(spec.csv_path);
    if (!in)
      throw std::invalid_argument("gen_base: cannot open " + spec.csv_path);
    return parse_csv_points(in, spec.csv_header);
  }

  if (spec.d < 1 || spec.n < 1 || spec.k_true < 1)
    throw std::invalid_argument("gen_base: d, n and k_true must be >= 1");
  PointSet means(spec.k_true, spec.d);
  for (std::size_t c = 0; c < spec.k_true; ++c)
    for (std::size_t j = 0; j < spec.d; ++j)
      means.row(c)[j] = -10.0 + 20.0 * rng.uniform01();

  PointSet out(spec.n, spec.d);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const std::size_t c = rng.uniform_index(spec.k_true);
    auto row = out.row(i);
    const auto m = means.row(c);
    for (std::size_t j = 0; j < spec.d; ++j) row[j] = m[j] + rng.normal();
  }
  return out;
}

Point random_unit_vector(std::size_t d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("random_unit_vector: d must be >= 1");
  Point v(d);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      v[j] = rng.normal();
      norm2 += v[j] * v[j];
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

double initial_alpha(double epsilon, double e_prev, std::size_t k,
                     std::size_t n_points) {
  if (epsilon < 0.0)
    throw std::invalid_argument("initial_alpha: epsilon must be >= 0");
  if (!(e_prev > 0.0))
    throw std::invalid_argument("initial_alpha: pre-drift error must be positive");
  if (k < 1 || n_points < 1)
    throw std::invalid_argument("initial_alpha: k and n_points must be >= 1");
  return std::sqrt(epsilon * e_prev /
                   (static_cast<double>(k) * static_cast<double>(n_points)));
}

DriftResult drift_translate(const ConceptPool& pool, double epsilon, Rng& rng,
                            const SolverConfig& solver) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("drift_translate: epsilon must be positive");
  const PointSet& pts = pool.points;
  const CentroidSet& ref = pool.reference_centroids;
  const std::size_t n = pts.size();
  const std::size_t d = pts.dim();
  const std::size_t k = ref.size();
  if (n == 0 || k == 0)
    throw std::invalid_argument("drift_translate: empty pool or centroids");

  DistanceCounter scratch;
  std::vector<std::int32_t> labels(n);
  std::vector<double> sqd(n);
  kernels::nearest_assign(pts, ref.centroids, labels.data(), sqd.data(), scratch,
                          solver.exec);
  const double e_sum = kernels::chunked_sum(sqd, nullptr, solver.exec);
  const double e_prev = e_sum / static_cast<double>(n);
  if (!(e_prev > 0.0))
    throw std::invalid_argument("drift_translate: pre-drift error is zero");
  const double target = (1.0 + epsilon) * e_prev;

  PointSet directions(d);
  for (std::size_t c = 0; c < k; ++c) directions.push_row(random_unit_vector(d, rng));

  // The alpha scale uses the summed error; the mean-normalized form would need
  // O(sqrt(K n)) fixed-size steps to climb to the drift magnitude.
  const double alpha1 = initial_alpha(epsilon, e_sum, k, n);
  double alpha = alpha1;
  double best_dev = std::numeric_limits<double>::infinity();
  double best_alpha = alpha, best_ratio = 0.0;
  constexpr int kMaxAlphaIters = 50;

  PointSet translated(n, d);
  for (int iter = 1; iter <= kMaxAlphaIters; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto src = pts.row(i);
      const auto dir = directions.row(static_cast<std::size_t>(labels[i]));
      auto dst = translated.row(i);
      for (std::size_t j = 0; j < d; ++j) dst[j] = src[j] + alpha * dir[j];
    }
    const double e_j = kmeans_error(translated, ref, scratch, solver.exec);
    const double ratio = e_j / target;
    const double dev = std::abs(ratio - 1.0);
    if (dev < best_dev) {
      best_dev = dev;
      best_alpha = alpha;
      best_ratio = e_j / e_prev;
    }
    if (dev < 0.05) {
      DriftResult res;
      res.achieved_ratio = e_j / e_prev;
      res.alpha_iterations = iter;
      res.pool.points = std::move(translated);
      res.pool.concept_id = pool.concept_id + 1;
      DistanceCounter fit_ctr;
      res.pool.reference_centroids =
          lloyd(res.pool.points, ref, solver, fit_ctr).centroids;
      return res;
    }
    alpha = std::max(0.0, alpha - (ratio - 1.0) * alpha1);
  }
  throw DriftCalibrationError(
      "drift_translate: alpha calibration did not reach the 5% band within 50 iterations",
      best_alpha, best_ratio);
}

DriftStream::DriftStream(const DriftStreamSpec& spec)
    : spec_(spec), rng_(spec.seed) {
  if (!(spec.epsilon > 0.0))
    throw std::invalid_argument("DriftStream: epsilon must be positive");
  if (spec.batch_size < 1)
    throw std::invalid_argument("DriftStream: batch_size must be >= 1");
  if (spec.k_cluster < 1 || spec.batch_size < spec.k_cluster)
    throw std::invalid_argument("DriftStream: batch_size must be >= k_cluster");
  if (spec.drift_period < 1)
    throw std::invalid_argument("DriftStream: drift_period must be >= 1");
  warmup_ = spec.warmup < 0 ? spec.drift_period : spec.warmup;
  if (warmup_ < 1)
    throw std::invalid_argument("DriftStream: warmup must be >= 1");

  pool_.points = gen_base(spec.base, rng_);
  if (pool_.points.size() < spec.batch_size)
    throw std::invalid_argument("DriftStream: pool smaller than batch size");
  pool_.concept_id = 0;
  DistanceCounter scratch;
  const CentroidSet seed =
      kmpp_seed(pool_.points, spec.k_cluster, rng_, scratch);
  pool_.reference_centroids = lloyd(pool_.points, seed, solver_, scratch).centroids;
}

std::pair<Batch, std::int64_t> DriftStream::next() {
  if (batch_index_ >= warmup_ &&
      (batch_index_ - warmup_) % spec_.drift_period == 0) {
    DriftResult res = drift_translate(pool_, spec_.epsilon, rng_, solver_);
    pool_ = std::move(res.pool);
    ratios_.push_back(res.achieved_ratio);
  }
  Batch b;
  b.points = PointSet(pool_.points.dim());
  b.points.reserve_rows(spec_.batch_size);
  for (std::size_t i = 0; i < spec_.batch_size; ++i)
    b.points.push_row(pool_.points.row(rng_.uniform_index(pool_.points.size())));
  ++batch_index_;
  return {std::move(b), pool_.concept_id};
}

}  // namespace skm
