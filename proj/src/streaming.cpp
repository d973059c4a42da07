#include "skm/streaming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "skm/kernels.hpp"

namespace skm {
namespace {

double min_sq_to_set(std::span<const double> p, const PointSet& set,
                     DistanceCounter& counter) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t d = set.dim();
  for (std::size_t c = 0; c < set.size(); ++c) {
    const double* ck = set.data() + c * d;
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = p[j] - ck[j];
      acc += diff * diff;
    }
    if (acc < best) best = acc;
  }
  counter.add(set.size());
  return best;
}

void store_labels(StreamState& state, const BatchWindow& window,
                  const Partition& flat) {
  auto split = per_batch_labels(window, flat);
  for (std::size_t t = 0; t < window.size(); ++t)
    state.window.entry(t).labels = std::move(split[t]);
}

StepMetrics run_window_solver(StreamState& state, const CentroidSet& c0,
                              const SolverConfig& solver,
                              DistanceCounter& counter,
                              std::uint64_t count_start) {
  LloydResult res = batch_window_lloyd(state.window, c0, solver, counter);
  store_labels(state, state.window, res.labels);
  state.centroids = std::move(res.centroids);
  return StepMetrics{res.initial_error(), res.converged_error(), res.iterations,
                     counter.count() - count_start};
}

}  // namespace

double rho_from(double epsilon, int m, int tau) {
  if (!(epsilon > 0.01))
    throw std::invalid_argument("rho_from: epsilon must exceed 0.01");
  if (m < 1 || tau < 1)
    throw std::invalid_argument("rho_from: m and tau must be positive");
  return std::pow(0.01 / epsilon,
                  static_cast<double>(m) / static_cast<double>(tau));
}

double surrogate_error_with_rho(const BatchWindow& window, double rho,
                                const CentroidSet& c, DistanceCounter& counter,
                                Exec exec) {
  if (window.empty())
    throw std::invalid_argument("surrogate_error: empty window");
  double num = 0.0, mass = 0.0, w = 1.0;
  std::vector<std::int32_t> labels;
  std::vector<double> sqd;
  for (std::size_t t = 0; t < window.size(); ++t) {
    const PointSet& pts = window.entry(t).batch.points;
    labels.resize(pts.size());
    sqd.resize(pts.size());
    kernels::nearest_assign(pts, c.centroids, labels.data(), sqd.data(), counter,
                            exec);
    num += w * kernels::chunked_sum(sqd, nullptr, exec);
    mass += w * static_cast<double>(pts.size());
    w *= rho;
  }
  return num / mass;
}

double surrogate_error(const BatchWindow& window, const CentroidSet& c,
                       DistanceCounter& counter, Exec exec) {
  return surrogate_error_with_rho(window, window.rho(), c, counter, exec);
}

double skm_error(std::span<const Batch> batches_since_drift,
                 const CentroidSet& c, DistanceCounter& counter, Exec exec) {
  if (batches_since_drift.empty())
    throw std::invalid_argument("skm_error: empty batch list");
  double num = 0.0;
  std::size_t n = 0;
  std::vector<std::int32_t> labels;
  std::vector<double> sqd;
  for (const Batch& b : batches_since_drift) {
    labels.resize(b.points.size());
    sqd.resize(b.points.size());
    kernels::nearest_assign(b.points, c.centroids, labels.data(), sqd.data(),
                            counter, exec);
    num += kernels::chunked_sum(sqd, nullptr, exec);
    n += b.points.size();
  }
  return num / static_cast<double>(n);
}

CentroidSet init_upc(const StreamState& state) {
  if (!state.initialized())
    throw std::invalid_argument("init_upc: no previously converged centroids");
  return state.centroids;
}

CentroidSet init_icb(const Batch& new_batch, std::size_t k, Rng& rng,
                     DistanceCounter& counter,
                     std::vector<std::int32_t>* labels_out) {
  return kmpp_seed(new_batch.points, k, rng, counter, labels_out);
}

std::pair<std::vector<double>, std::vector<double>> centroid_weights(
    const BatchWindow& window, std::span<const std::int32_t> zero_labels,
    std::size_t k) {
  if (window.empty())
    throw std::invalid_argument("centroid_weights: empty window");
  if (zero_labels.size() != window.entry(0).batch.points.size())
    throw std::invalid_argument("centroid_weights: zero_labels size mismatch");

  std::vector<double> w_star(k, 0.0), w_zero(k, 0.0);
  const std::vector<double> bw = window.batch_weights();
  for (std::size_t t = 1; t < window.size(); ++t) {
    const auto& labels = window.entry(t).labels;
    if (labels.size() != window.entry(t).batch.points.size())
      throw std::invalid_argument("centroid_weights: stored labels missing");
    for (const std::int32_t l : labels)
      w_star[static_cast<std::size_t>(l)] += bw[t];
  }
  for (const std::int32_t l : zero_labels)
    w_zero[static_cast<std::size_t>(l)] += 1.0;
  return {std::move(w_star), std::move(w_zero)};
}

CentroidSet init_wki(const BatchWindow& window, const CentroidSet& c_star,
                     const CentroidSet& c_zero,
                     std::span<const std::int32_t> zero_labels,
                     const SolverConfig& solver, Rng& rng,
                     DistanceCounter& counter) {
  const std::size_t k = c_star.size();
  if (c_zero.size() != k)
    throw std::invalid_argument("init_wki: centroid set size mismatch");
  auto [w_star, w_zero] = centroid_weights(window, zero_labels, k);

  PointSet candidates(c_star.dim());
  std::vector<double> cand_w;
  for (std::size_t i = 0; i < k; ++i) {
    candidates.push_row(c_star.centroids.row(i));
    cand_w.push_back(w_star[i]);
  }
  for (std::size_t i = 0; i < k; ++i) {
    candidates.push_row(c_zero.centroids.row(i));
    cand_w.push_back(w_zero[i]);
  }

  WeightedPointSet wps(candidates, cand_w);
  if (wps.size() >= k) {
    CentroidSet seed = weighted_kmpp_seed(wps.points, wps.weights, k, rng, counter);
    return weighted_lloyd(wps, seed, solver, counter).centroids;
  }

  // Degenerate: fewer than K positive-weight candidates. Pad with the dropped
  // (zero-weight) candidates in stable order; every candidate is then its own
  // cluster, which is already the fixed point.
  PointSet out = wps.points;
  for (std::size_t i = 0; i < candidates.size() && out.size() < k; ++i)
    if (cand_w[i] == 0.0) out.push_row(candidates.row(i));
  if (out.size() < k)
    throw std::invalid_argument("init_wki: fewer candidates than clusters");
  return CentroidSet(std::move(out));
}

double upper_bound_f(const BatchWindow& window, const CentroidSet& c,
                     const CentroidSet& c_star, const CentroidSet& c_zero,
                     std::span<const double> w_star,
                     std::span<const double> w_zero, DistanceCounter& counter) {
  const std::size_t k = c_star.size();
  if (w_star.size() != k || w_zero.size() != c_zero.size())
    throw std::invalid_argument("upper_bound_f: weight size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    acc += w_star[i] * min_sq_to_set(c_star.centroids.row(i), c.centroids, counter);
  for (std::size_t i = 0; i < c_zero.size(); ++i)
    acc += w_zero[i] * min_sq_to_set(c_zero.centroids.row(i), c.centroids, counter);
  return acc / window.mass();
}

double upper_bound_const(const BatchWindow& window, const CentroidSet& c_star,
                         const CentroidSet& c_zero,
                         std::span<const std::int32_t> zero_labels,
                         DistanceCounter& counter) {
  if (window.empty())
    throw std::invalid_argument("upper_bound_const: empty window");
  const std::vector<double> bw = window.batch_weights();

  double acc = 0.0;
  for (std::size_t t = 1; t < window.size(); ++t) {
    const PointSet& pts = window.entry(t).batch.points;
    const auto& labels = window.entry(t).labels;
    if (labels.size() != pts.size())
      throw std::invalid_argument("upper_bound_const: stored labels missing");
    double s = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      s += sq_dist(pts.row(i),
                   c_star.centroids.row(static_cast<std::size_t>(labels[i])),
                   counter);
    acc += bw[t] * s;
  }
  const PointSet& b0 = window.entry(0).batch.points;
  if (zero_labels.size() != b0.size())
    throw std::invalid_argument("upper_bound_const: zero_labels size mismatch");
  for (std::size_t i = 0; i < b0.size(); ++i)
    acc += sq_dist(b0.row(i),
                   c_zero.centroids.row(static_cast<std::size_t>(zero_labels[i])),
                   counter);
  return acc / window.mass();
}

CostMatrix hi_cost_matrix(const CentroidSet& c_star, const CentroidSet& c_zero,
                          std::span<const double> w_star,
                          std::span<const double> w_zero,
                          DistanceCounter& counter) {
  const std::size_t k = c_star.size();
  if (c_zero.size() != k || w_star.size() != k || w_zero.size() != k)
    throw std::invalid_argument("hi_cost_matrix: size mismatch");
  CostMatrix m(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double d2 =
          sq_dist(c_star.centroids.row(i), c_zero.centroids.row(j), counter);
      const double ws = w_star[i], wz = w_zero[j];
      m.at(i, j) = (ws == 0.0 || wz == 0.0) ? 0.0 : ws * wz / (ws + wz) * d2;
    }
  }
  return m;
}

CentroidSet init_hi(const BatchWindow& window, const CentroidSet& c_star,
                    const CentroidSet& c_zero,
                    std::span<const std::int32_t> zero_labels,
                    DistanceCounter& counter) {
  const std::size_t k = c_star.size();
  if (c_zero.size() != k)
    throw std::invalid_argument("init_hi: centroid set size mismatch");
  auto [w_star, w_zero] = centroid_weights(window, zero_labels, k);
  const CostMatrix m = hi_cost_matrix(c_star, c_zero, w_star, w_zero, counter);
  const AssignmentResult lsap = solve_lsap(m);

  const std::size_t d = c_star.dim();
  PointSet merged(d);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t s = lsap.sigma[i];
    const double ws = w_star[i], wz = w_zero[s];
    const auto a = c_star.centroids.row(i);
    const auto b = c_zero.centroids.row(s);
    Point row(d);
    if (ws + wz > 0.0) {
      for (std::size_t j = 0; j < d; ++j) row[j] = (ws * a[j] + wz * b[j]) / (ws + wz);
    } else {
      for (std::size_t j = 0; j < d; ++j) row[j] = b[j];
    }
    merged.push_row(row);
  }
  return CentroidSet(std::move(merged));
}

StepMetrics fskm_step(StreamState& state, Batch new_batch, InitializerKind kind,
                      const StepConfig& cfg, Rng& rng,
                      DistanceCounter& counter) {
  const std::uint64_t start = counter.count();

  if (!state.initialized()) {
    const CentroidSet c0 = kmpp_seed(new_batch.points, cfg.k, rng, counter);
    state.window.append_newest(std::move(new_batch));
    return run_window_solver(state, c0, cfg.solver, counter, start);
  }

  if (state.window.at_capacity()) state.window.evict_oldest();
  state.window.append_newest(std::move(new_batch));
  const Batch& b0 = state.window.entry(0).batch;

  CentroidSet c0;
  switch (kind) {
    case InitializerKind::Upc:
      c0 = init_upc(state);
      break;
    case InitializerKind::Icb:
      c0 = init_icb(b0, cfg.k, rng, counter);
      break;
    case InitializerKind::Wki: {
      std::vector<std::int32_t> zero_labels;
      const CentroidSet cz = init_icb(b0, cfg.k, rng, counter, &zero_labels);
      c0 = init_wki(state.window, state.centroids, cz, zero_labels, cfg.solver,
                    rng, counter);
      break;
    }
    case InitializerKind::Hi: {
      std::vector<std::int32_t> zero_labels;
      const CentroidSet cz = init_icb(b0, cfg.k, rng, counter, &zero_labels);
      c0 = init_hi(state.window, state.centroids, cz, zero_labels, counter);
      break;
    }
  }
  return run_window_solver(state, c0, cfg.solver, counter, start);
}

StepMetrics pskm_step(StreamState& state, Batch new_batch, bool drift_occurred,
                      const StepConfig& cfg, Rng& rng,
                      DistanceCounter& counter) {
  const std::uint64_t start = counter.count();

  CentroidSet c0;
  if (drift_occurred || !state.initialized()) {
    state.window.clear();
    c0 = kmpp_seed(new_batch.points, cfg.k, rng, counter);
  } else {
    c0 = state.centroids;
  }
  state.window.append_newest(std::move(new_batch));
  // rho == 1 makes the window solve identical to unweighted Lloyd on the pool.
  return run_window_solver(state, c0, cfg.solver, counter, start);
}

}  // namespace skm
