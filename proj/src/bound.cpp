#include "skm/bound.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "skm/kernels.hpp"
#include "skm/lloyd.hpp"

namespace skm {
namespace {

void validate(const BoundParams& p) {
  if (!(p.rho > 0.0) || p.rho >= 1.0)
    throw std::invalid_argument("bound_e: rho must be in (0, 1)");
  if (p.t < 1) throw std::invalid_argument("bound_e: T must be >= 1");
  if (p.n < 1) throw std::invalid_argument("bound_e: N must be >= 1");
  if (!(p.delta > 0.0) || p.delta >= 1.0)
    throw std::invalid_argument("bound_e: delta must be in (0, 1)");
  if (p.b < 0.0) throw std::invalid_argument("bound_e: b must be >= 0");
}

// Mean squared distance of every pool point to c, plus the pool maximum.
std::pair<double, double> pool_stats(const PointSet& pool,
                                     const CentroidSet& c, Exec exec) {
  DistanceCounter scratch;
  std::vector<std::int32_t> labels(pool.size());
  std::vector<double> sqd(pool.size());
  kernels::nearest_assign(pool, c.centroids, labels.data(), sqd.data(), scratch,
                          exec);
  double maxv = 0.0;
  for (const double v : sqd) maxv = std::max(maxv, v);
  const double mean =
      kernels::chunked_sum(sqd, nullptr, exec) / static_cast<double>(pool.size());
  return {mean, maxv};
}

}  // namespace

double bound_e(const BoundParams& p) {
  validate(p);
  const double rho_t = std::pow(p.rho, p.t);
  const double term =
      (2.0 * rho_t - 1.0) / static_cast<double>(p.t) +
      (1.0 - p.rho) / (1.0 + p.rho);
  const double radicand =
      term / (2.0 * static_cast<double>(p.n)) * std::log(2.0 / p.delta);
  if (radicand < 0.0) {
    std::ostringstream msg;
    msg << "bound_e: negative radicand " << radicand << " for rho=" << p.rho
        << " T=" << p.t << " N=" << p.n << " delta=" << p.delta;
    throw std::domain_error(msg.str());
  }
  return p.b * std::sqrt(radicand);
}

std::pair<double, double> interval(const BoundParams& p) {
  const double e = bound_e(p);
  const double center = std::pow(p.rho, p.t) * p.epsilon * p.e;
  return {center - e, center + e};
}

CoverageReport verify_theorem1(const Theorem1Config& cfg) {
  if (cfg.repetitions < 1 || cfg.old_batches < 1 || cfg.new_batches < 1)
    throw std::invalid_argument("verify_theorem1: counts must be >= 1");

  if (cfg.epsilon < 0.0)
    throw std::invalid_argument("verify_theorem1: epsilon must be >= 0");

  // Both concept pools, generated once; batches are drawn from them per rep.
  Rng gen_rng(mix_seed(cfg.seed, 0));
  PointSet old_pool = gen_base(cfg.base, gen_rng);
  DistanceCounter scratch;
  SolverConfig solver;
  solver.exec = cfg.exec;
  PointSet new_pool;
  if (cfg.epsilon == 0.0) {
    new_pool = old_pool;  // no drift: both concepts share the distribution
  } else {
    const CentroidSet seed = kmpp_seed(old_pool, cfg.k_cluster, gen_rng, scratch);
    CentroidSet ref = lloyd(old_pool, seed, solver, scratch).centroids;
    DriftResult drift = drift_translate(ConceptPool{old_pool, 0, ref},
                                        cfg.epsilon, gen_rng, solver);
    new_pool = std::move(drift.pool.points);
  }

  // c: center of mass of the first concept. b: farthest realized sq distance.
  PointSet c_set(old_pool.dim());
  {
    std::vector<double> unit(old_pool.size(), 1.0);
    c_set.push_row(weighted_mean(old_pool, unit));
  }
  const CentroidSet c{c_set};

  CoverageReport report;
  const auto [e_old, max_old] = pool_stats(old_pool, c, cfg.exec);
  const auto [e_new, max_new] = pool_stats(new_pool, c, cfg.exec);
  report.empirical_e = e_old;
  report.empirical_epsilon = e_new / e_old - 1.0;
  report.b = std::max(max_old, max_new);

  const int tn = cfg.new_batches;
  const std::size_t bn = cfg.batch_n;
  std::vector<double> diffs(static_cast<std::size_t>(cfg.repetitions) * tn);

#pragma omp parallel for schedule(static)
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    Rng rng(mix_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(rep)));
    DistanceCounter ctr;

    auto batch_sq_sum = [&](const PointSet& pool) {
      double s = 0.0;
      const std::size_t d = pool.dim();
      const auto cc = c.centroids.row(0);
      for (std::size_t i = 0; i < bn; ++i) {
        const auto x = pool.row(rng.uniform_index(pool.size()));
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = x[j] - cc[j];
          acc += diff * diff;
        }
        s += acc;
      }
      ctr.add(bn);
      return s;
    };

    std::vector<double> old_sums(cfg.old_batches);
    for (int i = 0; i < cfg.old_batches; ++i) old_sums[i] = batch_sq_sum(old_pool);
    std::vector<double> new_sums;
    new_sums.reserve(tn);

    for (int t = 1; t <= tn; ++t) {
      new_sums.push_back(batch_sq_sum(new_pool));

      // E_*: pooled over the T new-concept batches.
      double star = 0.0;
      for (const double s : new_sums) star += s;
      star /= static_cast<double>(t) * static_cast<double>(bn);

      // E_rho over all stored batches, newest first. New batches hold
      // antiquities 0..T-1, old batches T..T+old-1 (last stored old = T).
      double num = 0.0, mass = 0.0, w = 1.0;
      for (int j = t - 1; j >= 0; --j) {
        num += w * new_sums[static_cast<std::size_t>(j)];
        mass += w * static_cast<double>(bn);
        w *= cfg.rho;
      }
      for (int i = cfg.old_batches - 1; i >= 0; --i) {
        num += w * old_sums[static_cast<std::size_t>(i)];
        mass += w * static_cast<double>(bn);
        w *= cfg.rho;
      }
      diffs[(static_cast<std::size_t>(rep)) * tn + static_cast<std::size_t>(t - 1)] =
          star - num / mass;
    }
  }

  for (int t = 1; t <= tn; ++t) {
    BoundParams p;
    p.rho = cfg.rho;
    p.t = t;
    p.n = bn;
    p.delta = cfg.delta;
    p.b = report.b;
    p.epsilon = report.empirical_epsilon;
    p.e = report.empirical_e;
    const auto [low, high] = interval(p);

    CoverageRow row;
    row.t = t;
    row.center = (low + high) / 2.0;
    row.e_halfwidth = (high - low) / 2.0;
    std::size_t inside = 0;
    double sum = 0.0;
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      const double diff =
          diffs[static_cast<std::size_t>(rep) * tn + static_cast<std::size_t>(t - 1)];
      sum += diff;
      if (diff > low && diff < high) ++inside;
    }
    row.coverage = static_cast<double>(inside) / cfg.repetitions;
    row.mean_diff = sum / cfg.repetitions;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace skm
