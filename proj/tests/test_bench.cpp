#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "skm/bench.hpp"
#include "skm/csvio.hpp"

using namespace skm;

namespace {

ExperimentRecord make_record(Algo algo, double init, double conv, double skm,
                             std::uint64_t dist) {
  ExperimentRecord r;
  r.algo = algo;
  r.eps = 1.0;
  r.k = 5;
  r.m = 2;
  r.rho = 0.398;
  r.rep = 0;
  r.global_batch = 1;
  r.batch_in_concept = 1;
  r.init_surr = init;
  r.conv_surr = conv;
  r.conv_skm = skm;
  r.distances = dist;
  r.iterations = 3;
  return r;
}

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.d = 2;
  cfg.pool_n = 300;
  cfg.k_true = 3;
  cfg.epsilon = 1.0;
  cfg.batch_size = 40;
  cfg.tau = 5;
  cfg.k = 3;
  cfg.m = 2;
  cfg.repetitions = 1;
  cfg.seed = 99;
  cfg.measured_batches = 10;
  return cfg;
}

}  // namespace

TEST_CASE("algo ids round-trip") {
  for (const Algo a : kAllAlgos) CHECK(algo_from_id(algo_id(a)) == a);
  CHECK(!algo_from_id("nope").has_value());
}

TEST_CASE("normalize_scores hand values") {
  std::vector<ExperimentRecord> group{
      make_record(Algo::Pskm, 2, 2, 2, 100),
      make_record(Algo::FskmUpc, 3, 3, 3, 200),
      make_record(Algo::FskmHi, 4, 4, 4, 250),
  };
  const auto norm = normalize_scores(group);
  REQUIRE(norm.size() == 3);
  CHECK(norm[0].e_conv == 0.0);
  CHECK(norm[1].e_conv == 0.5);
  CHECK(norm[2].e_conv == 1.0);
  CHECK(norm[0].d_hat == 1.0);
  CHECK(norm[1].d_hat == 2.0);
  CHECK(norm[2].d_hat == 2.5);
  CHECK(!norm[0].flag_conv);
}

TEST_CASE("normalize_scores flags zero minima and rejects tiny groups") {
  std::vector<ExperimentRecord> group{
      make_record(Algo::Pskm, 0, 0, 1, 100),
      make_record(Algo::FskmUpc, 3, 3, 2, 200),
  };
  const auto norm = normalize_scores(group);
  CHECK(norm[0].flag_init);
  CHECK(norm[0].flag_conv);
  CHECK(!norm[0].flag_skm);
  CHECK(norm[1].e_skm == 1.0);

  std::vector<ExperimentRecord> lone{make_record(Algo::Pskm, 1, 1, 1, 1)};
  CHECK_THROWS_AS(normalize_scores(lone), std::invalid_argument);
}

TEST_CASE("quantile: median of a symmetric pair and R-7 interpolation") {
  CHECK(quantile({0.0, 1.0}, 0.5) == 0.5);
  CHECK(quantile({5.0}, 0.5) == 5.0);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
}

TEST_CASE("aggregate: single record per cell yields that value as median") {
  std::vector<ExperimentRecord> records{
      make_record(Algo::Pskm, 2, 2, 2, 100),
      make_record(Algo::FskmUpc, 3, 3, 3, 200),
  };
  const auto rows = aggregate(records, {1});
  REQUIRE(!rows.empty());
  for (const auto& row : rows) {
    if (row.algo == Algo::FskmUpc && row.metric == "conv_surr") {
      CHECK(row.median == 0.5);
      CHECK(row.q1 == 0.5);
      CHECK(row.q3 == 0.5);
    }
  }
  CHECK(aggregate(records, {4}).empty());  // empty selection, not an error
}

TEST_CASE("run_experiment: record layout, invariants, determinism") {
  const ExperimentConfig cfg = tiny_config();
  const auto records = run_experiment(cfg);
  REQUIRE(records.size() == 5u * 10u);

  int upc_rows = 0;
  for (const auto& r : records) {
    CHECK(r.rho == doctest::Approx(0.398).epsilon(1e-3));
    CHECK(r.global_batch >= 1);
    CHECK(r.global_batch <= 10);
    CHECK(r.batch_in_concept == (r.global_batch - 1) % 5 + 1);
    CHECK(r.conv_surr <= r.init_surr * (1 + 1e-9) + 1e-15);
    CHECK(r.distances > 0);
    CHECK(r.iterations >= 1);
    if (r.algo == Algo::FskmUpc) ++upc_rows;
  }
  CHECK(upc_rows == 10);

  const auto again = run_experiment(cfg);
  std::ostringstream a, b;
  write_records_csv(a, records);
  write_records_csv(b, again);
  CHECK(a.str() == b.str());
}

TEST_CASE("run_experiment honors the algorithm filter") {
  ExperimentConfig cfg = tiny_config();
  cfg.algorithms = {Algo::Pskm, Algo::FskmHi};
  const auto records = run_experiment(cfg);
  REQUIRE(records.size() == 2u * 10u);
  for (const auto& r : records)
    CHECK((r.algo == Algo::Pskm || r.algo == Algo::FskmHi));
}

TEST_CASE("run_experiment validates its configuration") {
  ExperimentConfig cfg = tiny_config();
  cfg.k = 100;  // larger than batch_size
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
  cfg = tiny_config();
  cfg.epsilon = 0.005;
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("records CSV round-trips") {
  const ExperimentConfig cfg = tiny_config();
  const auto records = run_experiment(cfg);
  std::stringstream buf;
  write_records_csv(buf, records);
  const auto loaded = read_records_csv(buf);
  REQUIRE(loaded.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(loaded[i].algo == records[i].algo);
    CHECK(loaded[i].init_surr == records[i].init_surr);
    CHECK(loaded[i].conv_surr == records[i].conv_surr);
    CHECK(loaded[i].conv_skm == records[i].conv_skm);
    CHECK(loaded[i].distances == records[i].distances);
  }
  std::stringstream bad("algo,eps,K,m,rho,rep,global_batch,batch_in_concept,"
                        "init_surr,conv_surr,conv_skm,distances,iterations\n"
                        "pskm,oops,5,2,0.4,0,1,1,1,1,1,10,1\n");
  CHECK_THROWS_WITH_AS(read_records_csv(bad),
                       doctest::Contains("line 2"), std::invalid_argument);
}

TEST_CASE("run_experiment_on_stream replays a fixed sequence") {
  DriftStreamSpec spec;
  spec.base.d = 2;
  spec.base.n = 300;
  spec.base.k_true = 3;
  spec.epsilon = 1.0;
  spec.batch_size = 40;
  spec.drift_period = 5;
  spec.k_cluster = 3;
  spec.seed = 7;
  spec.warmup = 8;  // t_max for rho = 0.398
  DriftStream stream(spec);
  std::vector<Batch> batches;
  std::vector<std::int64_t> cids;
  for (int i = 0; i < 18; ++i) {
    auto [b, c] = stream.next();
    batches.push_back(std::move(b));
    cids.push_back(c);
  }

  ExperimentConfig cfg = tiny_config();
  const auto records = run_experiment_on_stream(cfg, batches, cids);
  CHECK(records.size() == 5u * 10u);

  // Too short a stream is rejected.
  ExperimentConfig big = cfg;
  big.measured_batches = 50;
  CHECK_THROWS_AS(run_experiment_on_stream(big, batches, cids),
                  std::invalid_argument);
}
