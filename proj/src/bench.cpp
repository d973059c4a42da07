#include "skm/bench.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>

#include "skm/streaming.hpp"

namespace skm {

std::string_view algo_id(Algo a) {
  switch (a) {
    case Algo::Pskm: return "pskm";
    case Algo::FskmUpc: return "fskm-upc";
    case Algo::FskmIcb: return "fskm-icb";
    case Algo::FskmWki: return "fskm-wki";
    case Algo::FskmHi: return "fskm-hi";
  }
  return "?";
}

std::optional<Algo> algo_from_id(std::string_view id) {
  for (const Algo a : kAllAlgos)
    if (algo_id(a) == id) return a;
  return std::nullopt;
}

namespace {

InitializerKind fskm_kind(Algo a) {
  switch (a) {
    case Algo::FskmUpc: return InitializerKind::Upc;
    case Algo::FskmIcb: return InitializerKind::Icb;
    case Algo::FskmWki: return InitializerKind::Wki;
    case Algo::FskmHi: return InitializerKind::Hi;
    case Algo::Pskm: break;
  }
  throw std::logic_error("fskm_kind: PSKM has no initializer");
}

struct Resolved {
  ExperimentConfig cfg;
  double rho = 0.0;
  std::size_t t_max = 0;
  std::vector<Algo> algos;
};

Resolved resolve(const ExperimentConfig& cfg) {
  if (cfg.k < 1) throw std::invalid_argument("run_experiment: k must be >= 1");
  if (cfg.batch_size < cfg.k)
    throw std::invalid_argument("run_experiment: batch_size must be >= k");
  if (cfg.tau < 1) throw std::invalid_argument("run_experiment: tau must be >= 1");
  if (cfg.repetitions < 1)
    throw std::invalid_argument("run_experiment: repetitions must be >= 1");
  if (cfg.measured_batches < 1)
    throw std::invalid_argument("run_experiment: measured_batches must be >= 1");

  Resolved r;
  r.cfg = cfg;
  r.rho = rho_from(cfg.epsilon, cfg.m, cfg.tau);
  r.t_max = cfg.t_max != 0 ? cfg.t_max : BatchWindow::default_t_max(r.rho);
  r.algos = cfg.algorithms;
  if (r.algos.empty()) r.algos.assign(std::begin(kAllAlgos), std::end(kAllAlgos));
  return r;
}

std::vector<ExperimentRecord> run_one_rep(const Resolved& rc, int rep,
                                          std::span<const Batch> fixed_batches,
                                          std::span<const std::int64_t> fixed_cids) {
  const ExperimentConfig& cfg = rc.cfg;
  const std::uint64_t rep_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(rep));

  std::optional<DriftStream> stream;
  if (fixed_batches.empty()) {
    DriftStreamSpec spec;
    spec.base.kind = BaseDataSpec::Kind::GaussianMixture;
    spec.base.d = cfg.d;
    spec.base.n = cfg.pool_n;
    spec.base.k_true = cfg.k_true != 0 ? cfg.k_true : cfg.k;
    spec.epsilon = cfg.epsilon;
    spec.batch_size = cfg.batch_size;
    spec.drift_period = cfg.tau;
    spec.k_cluster = cfg.k;
    spec.seed = mix_seed(rep_seed, 0x57AEA11);
    spec.warmup = static_cast<int>(rc.t_max);
    stream.emplace(spec);
  }

  std::vector<StreamState> states;
  std::vector<DistanceCounter> counters(rc.algos.size());
  for (const Algo a : rc.algos)
    states.push_back(a == Algo::Pskm ? make_pskm_state()
                                     : make_fskm_state(rc.rho, rc.t_max));
  DistanceCounter score_ctr;
  const StepConfig step{cfg.k, cfg.solver};

  std::vector<Batch> concept_pool;
  std::int64_t prev_cid = -1;
  std::vector<ExperimentRecord> records;
  const int total = static_cast<int>(rc.t_max) + cfg.measured_batches;

  for (int g = 1; g <= total; ++g) {
    Batch batch;
    std::int64_t cid = 0;
    if (stream) {
      auto [b, c] = stream->next();
      batch = std::move(b);
      cid = c;
    } else {
      batch = fixed_batches[static_cast<std::size_t>(g - 1)];
      cid = fixed_cids[static_cast<std::size_t>(g - 1)];
    }
    const bool drift = g > 1 && cid != prev_cid;
    prev_cid = cid;
    if (drift) concept_pool.clear();
    concept_pool.push_back(batch);

    const std::uint64_t step_seed =
        mix_seed(rep_seed, 0x5745B000ull + static_cast<std::uint64_t>(g));
    for (std::size_t a = 0; a < rc.algos.size(); ++a) {
      Rng rng(step_seed);
      Batch copy{batch.points, 0};
      const StepMetrics sm =
          rc.algos[a] == Algo::Pskm
              ? pskm_step(states[a], std::move(copy), drift, step, rng, counters[a])
              : fskm_step(states[a], std::move(copy), fskm_kind(rc.algos[a]), step,
                          rng, counters[a]);
      if (g <= static_cast<int>(rc.t_max)) continue;  // burn-in

      ExperimentRecord r;
      r.algo = rc.algos[a];
      r.eps = cfg.epsilon;
      r.k = cfg.k;
      r.m = cfg.m;
      r.rho = rc.rho;
      r.rep = rep;
      r.global_batch = g - static_cast<int>(rc.t_max);
      r.batch_in_concept = (r.global_batch - 1) % cfg.tau + 1;
      r.init_surr = sm.initial_error;
      r.conv_surr = sm.converged_error;
      r.conv_skm =
          skm_error(concept_pool, states[a].centroids, score_ctr, cfg.solver.exec);
      r.distances = sm.distances;
      r.iterations = sm.iterations;
      records.push_back(r);
    }
  }
  return records;
}

std::vector<ExperimentRecord> run_all(const Resolved& rc,
                                      std::span<const Batch> fixed_batches,
                                      std::span<const std::int64_t> fixed_cids,
                                      std::vector<ExperimentRecord>* partial_sink) {
  const int reps = rc.cfg.repetitions;
  std::vector<std::vector<ExperimentRecord>> per_rep(
      static_cast<std::size_t>(reps));
  std::vector<char> completed(static_cast<std::size_t>(reps), 0);
  std::exception_ptr error;
  const int jobs =
      rc.cfg.jobs > 0 ? std::min(rc.cfg.jobs, reps) : std::min(omp_get_max_threads(), reps);

#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (int rep = 0; rep < reps; ++rep) {
    try {
      per_rep[static_cast<std::size_t>(rep)] =
          run_one_rep(rc, rep, fixed_batches, fixed_cids);
      completed[static_cast<std::size_t>(rep)] = 1;
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) {
    if (partial_sink != nullptr) {
      for (std::size_t i = 0; i < per_rep.size(); ++i)
        if (completed[i])
          partial_sink->insert(partial_sink->end(), per_rep[i].begin(),
                               per_rep[i].end());
    }
    std::rethrow_exception(error);
  }

  std::vector<ExperimentRecord> records;
  for (auto& v : per_rep)
    records.insert(records.end(), v.begin(), v.end());
  return records;
}

using GroupKey = std::tuple<std::uint64_t, std::size_t, int, int, int>;

GroupKey group_key(const ExperimentRecord& r) {
  std::uint64_t eps_bits = 0;
  std::memcpy(&eps_bits, &r.eps, sizeof(eps_bits));
  return {eps_bits, r.k, r.m, r.rep, r.global_batch};
}

}  // namespace

std::vector<ExperimentRecord> run_experiment(
    const ExperimentConfig& cfg, std::vector<ExperimentRecord>* partial_sink) {
  return run_all(resolve(cfg), {}, {}, partial_sink);
}

std::vector<ExperimentRecord> run_experiment_on_stream(
    const ExperimentConfig& cfg, std::span<const Batch> batches,
    std::span<const std::int64_t> concept_ids,
    std::vector<ExperimentRecord>* partial_sink) {
  const Resolved rc = resolve(cfg);
  if (batches.size() != concept_ids.size())
    throw std::invalid_argument("run_experiment_on_stream: batch/tag size mismatch");
  const std::size_t needed = rc.t_max + static_cast<std::size_t>(cfg.measured_batches);
  if (batches.size() < needed)
    throw std::invalid_argument(
        "run_experiment_on_stream: stream too short (needs burn-in t_max + measured batches)");
  for (const Batch& b : batches)
    if (b.points.size() < cfg.k)
      throw std::invalid_argument("run_experiment_on_stream: batch smaller than k");
  for (std::size_t i = 0; i < rc.t_max; ++i)
    if (concept_ids[i] != concept_ids[0])
      throw std::invalid_argument(
          "run_experiment_on_stream: burn-in batches must share one concept");
  return run_all(rc, batches, concept_ids, partial_sink);
}

std::vector<NormalizedRecord> normalize_scores(
    std::span<const ExperimentRecord> group) {
  if (group.size() < 2)
    throw std::invalid_argument("normalize_scores: need at least two algorithms");
  const GroupKey key = group_key(group[0]);
  for (const auto& r : group)
    if (group_key(r) != key)
      throw std::invalid_argument("normalize_scores: mixed groups");

  double min_init = group[0].init_surr, min_conv = group[0].conv_surr;
  double min_skm = group[0].conv_skm;
  double min_dist = static_cast<double>(group[0].distances);
  for (const auto& r : group) {
    min_init = std::min(min_init, r.init_surr);
    min_conv = std::min(min_conv, r.conv_surr);
    min_skm = std::min(min_skm, r.conv_skm);
    min_dist = std::min(min_dist, static_cast<double>(r.distances));
  }

  std::vector<NormalizedRecord> out;
  out.reserve(group.size());
  for (const auto& r : group) {
    NormalizedRecord n;
    n.algo = r.algo;
    n.eps = r.eps;
    n.k = r.k;
    n.m = r.m;
    n.rep = r.rep;
    n.global_batch = r.global_batch;
    n.batch_in_concept = r.batch_in_concept;
    n.flag_init = min_init == 0.0;
    n.flag_conv = min_conv == 0.0;
    n.flag_skm = min_skm == 0.0;
    n.flag_dist = min_dist == 0.0;
    n.e_init = n.flag_init ? r.init_surr : (r.init_surr - min_init) / min_init;
    n.e_conv = n.flag_conv ? r.conv_surr : (r.conv_surr - min_conv) / min_conv;
    n.e_skm = n.flag_skm ? r.conv_skm : (r.conv_skm - min_skm) / min_skm;
    n.d_hat = n.flag_dist ? static_cast<double>(r.distances)
                          : static_cast<double>(r.distances) / min_dist;
    out.push_back(n);
  }
  return out;
}

std::vector<NormalizedRecord> normalize_all(
    std::span<const ExperimentRecord> records) {
  std::map<GroupKey, std::vector<ExperimentRecord>> groups;
  for (const auto& r : records) groups[group_key(r)].push_back(r);
  std::vector<NormalizedRecord> out;
  for (const auto& [key, group] : groups) {
    auto normalized = normalize_scores(group);
    out.insert(out.end(), normalized.begin(), normalized.end());
  }
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::vector<SummaryRow> aggregate(std::span<const ExperimentRecord> records,
                                  const std::set<int>& batch_indices) {
  const std::vector<NormalizedRecord> normalized = normalize_all(records);

  // (algo, eps bits, K, m, batch index, metric id) -> sample values
  using CellKey = std::tuple<int, std::uint64_t, std::size_t, int, int, int>;
  std::map<CellKey, std::vector<double>> cells;
  static constexpr const char* kMetrics[] = {"init_surr", "conv_surr", "conv_skm",
                                             "distances"};
  for (const auto& n : normalized) {
    if (!batch_indices.contains(n.batch_in_concept)) continue;
    std::uint64_t eps_bits = 0;
    std::memcpy(&eps_bits, &n.eps, sizeof(eps_bits));
    const double vals[] = {n.e_init, n.e_conv, n.e_skm, n.d_hat};
    const bool flags[] = {n.flag_init, n.flag_conv, n.flag_skm, n.flag_dist};
    for (int metric = 0; metric < 4; ++metric) {
      if (flags[metric]) continue;  // zero-minimum group, excluded
      cells[{static_cast<int>(n.algo), eps_bits, n.k, n.m, n.batch_in_concept,
             metric}]
          .push_back(vals[metric]);
    }
  }

  std::vector<SummaryRow> rows;
  for (const auto& [key, values] : cells) {
    SummaryRow row;
    row.algo = static_cast<Algo>(std::get<0>(key));
    const std::uint64_t eps_bits = std::get<1>(key);
    std::memcpy(&row.eps, &eps_bits, sizeof(row.eps));
    row.k = std::get<2>(key);
    row.m = std::get<3>(key);
    row.batch_index = std::get<4>(key);
    row.metric = kMetrics[std::get<5>(key)];
    row.median = quantile(values, 0.5);
    row.q1 = quantile(values, 0.25);
    row.q3 = quantile(values, 0.75);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace skm
