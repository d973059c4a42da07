#include "skm/lloyd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "skm/kernels.hpp"

namespace skm {
namespace {

double pair_sq_dist(const double* a, const double* b, std::size_t d) {
  double acc = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = a[j] - b[j];
    acc += diff * diff;
  }
  return acc;
}

// Farthest retained point from the stale centroid, excluding indices already
// used to repair another cluster in the same pass.
std::size_t farthest_point(const PointSet& points, const double* centroid,
                           const std::vector<bool>& used,
                           DistanceCounter& counter) {
  const std::size_t d = points.dim();
  double best = -1.0;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (used[i]) continue;
    const double d2 = pair_sq_dist(points.data() + i * d, centroid, d);
    if (d2 > best) {
      best = d2;
      best_i = i;
    }
  }
  counter.add(points.size());
  return best_i;
}

LloydResult run_engine(const PointSet& points, const double* weights,
                       const CentroidSet& c0, const SolverConfig& cfg,
                       DistanceCounter& counter) {
  const std::size_t n = points.size();
  const std::size_t k = c0.size();
  if (k == 0) throw std::invalid_argument("lloyd: empty initial centroid set");
  if (n < k) throw std::invalid_argument("lloyd: fewer points than clusters");
  if (points.dim() != c0.dim())
    throw std::invalid_argument("lloyd: dimension mismatch");
  if (cfg.max_iterations < 1)
    throw std::invalid_argument("lloyd: max_iterations must be >= 1");
  const std::size_t d = points.dim();

  double total_w = static_cast<double>(n);
  if (weights != nullptr)
    total_w = kernels::chunked_sum({weights, n}, nullptr, cfg.exec);

  LloydResult res;
  res.labels.assign(n, 0);
  std::vector<double> sqd(n);
  kernels::nearest_assign(points, c0.centroids, res.labels.data(), sqd.data(),
                          counter, cfg.exec);
  res.error_trace.push_back(kernels::chunked_sum(sqd, weights, cfg.exec) /
                            total_w);

  PointSet centroids = c0.centroids;
  std::vector<double> sums(k * d), masses(k);
  Partition next(n);

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    kernels::cluster_accumulate(points, weights, res.labels, k, sums, masses,
                                cfg.exec);
    std::vector<bool> used(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      auto row = centroids.row(c);
      if (masses[c] > 0.0) {
        for (std::size_t j = 0; j < d; ++j) row[j] = sums[c * d + j] / masses[c];
      } else {
        const std::size_t i = farthest_point(points, row.data(), used, counter);
        used[i] = true;
        const auto src = points.row(i);
        std::copy(src.begin(), src.end(), row.begin());
      }
    }

    kernels::nearest_assign(points, centroids, next.data(), sqd.data(), counter,
                            cfg.exec);
    res.error_trace.push_back(kernels::chunked_sum(sqd, weights, cfg.exec) /
                              total_w);
    res.iterations = iter;
    if (next == res.labels) break;
    res.labels.swap(next);
  }

  res.centroids = CentroidSet(std::move(centroids), std::move(masses));
  return res;
}

// Cumulative-mass sampling; never lands on a zero-mass entry while positive
// mass exists. Returns npos when the total mass is zero.
std::size_t sample_by_mass(std::span<const double> mass, Rng& rng) {
  double total = 0.0;
  for (const double m : mass) total += m;
  if (!(total > 0.0)) return static_cast<std::size_t>(-1);
  const double r = rng.uniform01() * total;
  double cum = 0.0;
  std::size_t last_positive = static_cast<std::size_t>(-1);
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] > 0.0) last_positive = i;
    cum += mass[i];
    if (cum > r) return i;
  }
  return last_positive;  // float rounding pushed r past the final cumsum
}

std::size_t uniform_unchosen(const std::vector<bool>& chosen, std::size_t n_left,
                             Rng& rng) {
  std::size_t pick = rng.uniform_index(n_left);
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    if (chosen[i]) continue;
    if (pick == 0) return i;
    --pick;
  }
  throw std::logic_error("uniform_unchosen: no candidate left");
}

CentroidSet kmpp_impl(const PointSet& points, const double* weights,
                      std::size_t k, Rng& rng, DistanceCounter& counter,
                      std::vector<std::int32_t>* labels_out) {
  const std::size_t n = points.size();
  const std::size_t d = points.dim();
  if (k == 0) throw std::invalid_argument("kmpp_seed: k must be >= 1");
  if (k > n) throw std::invalid_argument("kmpp_seed: more clusters than points");

  std::vector<bool> chosen(n, false);
  std::vector<double> mind2(n, std::numeric_limits<double>::infinity());
  std::vector<std::int32_t> labels(n, 0);
  std::vector<double> mass(n);
  PointSet centers(d);
  centers.reserve_rows(k);
  std::size_t n_chosen = 0;

  for (std::size_t c = 0; c < k; ++c) {
    std::size_t idx;
    if (c == 0) {
      if (weights == nullptr) {
        idx = rng.uniform_index(n);
      } else {
        idx = sample_by_mass({weights, n}, rng);
        if (idx == static_cast<std::size_t>(-1))
          throw std::invalid_argument("weighted_kmpp_seed: zero total weight");
      }
    } else {
      for (std::size_t i = 0; i < n; ++i)
        mass[i] = weights == nullptr ? mind2[i] : weights[i] * mind2[i];
      idx = sample_by_mass(mass, rng);
      if (idx == static_cast<std::size_t>(-1))
        idx = uniform_unchosen(chosen, n - n_chosen, rng);
    }
    chosen[idx] = true;
    ++n_chosen;
    centers.push_row(points.row(idx));

    const double* ck = centers.data() + c * d;
    for (std::size_t i = 0; i < n; ++i) {
      const double d2 = pair_sq_dist(points.data() + i * d, ck, d);
      if (d2 < mind2[i]) {
        mind2[i] = d2;
        labels[i] = static_cast<std::int32_t>(c);
      }
    }
    counter.add(n);
  }

  if (labels_out != nullptr) *labels_out = std::move(labels);
  return CentroidSet(std::move(centers));
}

}  // namespace

WeightedPointSet::WeightedPointSet(const PointSet& pts,
                                   std::span<const double> w) {
  if (pts.size() != w.size())
    throw std::invalid_argument("WeightedPointSet: weight count mismatch");
  points = PointSet(pts.dim());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (w[i] < 0.0)
      throw std::invalid_argument("WeightedPointSet: negative weight");
    if (w[i] > 0.0) {
      points.push_row(pts.row(i));
      weights.push_back(w[i]);
    }
  }
}

LloydResult lloyd(const PointSet& points, const CentroidSet& c0,
                  const SolverConfig& cfg, DistanceCounter& counter) {
  return run_engine(points, nullptr, c0, cfg, counter);
}

LloydResult weighted_lloyd(const WeightedPointSet& wps, const CentroidSet& c0,
                           const SolverConfig& cfg, DistanceCounter& counter) {
  return run_engine(wps.points, wps.weights.data(), c0, cfg, counter);
}

LloydResult batch_window_lloyd(const BatchWindow& window, const CentroidSet& c0,
                               const SolverConfig& cfg,
                               DistanceCounter& counter) {
  if (window.empty())
    throw std::invalid_argument("batch_window_lloyd: empty window");
  const std::vector<double> bw = window.batch_weights();
  PointSet flat(window.entry(0).batch.points.dim());
  flat.reserve_rows(window.total_points());
  std::vector<double> weights;
  weights.reserve(window.total_points());
  for (std::size_t t = 0; t < window.size(); ++t) {
    const PointSet& pts = window.entry(t).batch.points;
    flat.append(pts);
    weights.insert(weights.end(), pts.size(), bw[t]);
  }
  return run_engine(flat, weights.data(), c0, cfg, counter);
}

std::vector<std::vector<std::int32_t>> per_batch_labels(
    const BatchWindow& window, const Partition& flat) {
  std::vector<std::vector<std::int32_t>> out(window.size());
  std::size_t off = 0;
  for (std::size_t t = 0; t < window.size(); ++t) {
    const std::size_t n = window.entry(t).batch.points.size();
    out[t].assign(flat.begin() + static_cast<std::ptrdiff_t>(off),
                  flat.begin() + static_cast<std::ptrdiff_t>(off + n));
    off += n;
  }
  if (off != flat.size())
    throw std::invalid_argument("per_batch_labels: label count mismatch");
  return out;
}

CentroidSet kmpp_seed(const PointSet& points, std::size_t k, Rng& rng,
                      DistanceCounter& counter,
                      std::vector<std::int32_t>* labels_out) {
  return kmpp_impl(points, nullptr, k, rng, counter, labels_out);
}

CentroidSet weighted_kmpp_seed(const PointSet& points,
                               std::span<const double> weights, std::size_t k,
                               Rng& rng, DistanceCounter& counter) {
  if (weights.size() != points.size())
    throw std::invalid_argument("weighted_kmpp_seed: weight count mismatch");
  return kmpp_impl(points, weights.data(), k, rng, counter, nullptr);
}

}  // namespace skm
