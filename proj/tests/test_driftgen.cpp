#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "skm/csvio.hpp"
#include "skm/driftgen.hpp"

using namespace skm;

TEST_CASE("gen_base: deterministic, right shape, coherent single component") {
  BaseDataSpec spec;
  spec.d = 2;
  spec.n = 400;
  spec.k_true = 1;
  Rng r1(3), r2(3);
  const PointSet a = gen_base(spec, r1);
  const PointSet b = gen_base(spec, r2);
  CHECK(a == b);
  CHECK(a.size() == 400);
  CHECK(a.dim() == 2);

  // Split-half means agree within 3 sigma: unit variance per coordinate, so
  // the half-mean difference has sd sqrt(4/n) per axis.
  for (std::size_t j = 0; j < 2; ++j) {
    double m1 = 0, m2 = 0;
    for (std::size_t i = 0; i < 200; ++i) m1 += a.row(i)[j];
    for (std::size_t i = 200; i < 400; ++i) m2 += a.row(i)[j];
    m1 /= 200;
    m2 /= 200;
    CHECK(std::abs(m1 - m2) < 3.0 * std::sqrt(4.0 / 400));
  }
}

TEST_CASE("gen_base parses CSV pools") {
  std::stringstream csv("1,2,3\n4,5,6\n");
  const PointSet pts = parse_csv_points(csv, false);
  CHECK(pts.size() == 2);
  CHECK(pts.dim() == 3);
  CHECK(pts.row(1)[2] == 6.0);

  std::stringstream bad("1,2\n3\n");
  CHECK_THROWS_AS(parse_csv_points(bad, false), std::invalid_argument);
  std::stringstream with_header("x,y\n1,2\n");
  CHECK(parse_csv_points(with_header, true).size() == 1);
}

TEST_CASE("random_unit_vector: unit norm, d=1 gives a sign") {
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    const Point v1 = random_unit_vector(1, rng);
    CHECK(std::abs(v1[0]) == doctest::Approx(1.0).epsilon(1e-15));
    const Point v5 = random_unit_vector(5, rng);
    double norm2 = 0;
    for (const double x : v5) norm2 += x * x;
    CHECK(std::sqrt(norm2) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("random_unit_vector is isotropic") {
  Rng rng(5);
  double mean[3] = {0, 0, 0};
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Point v = random_unit_vector(3, rng);
    for (int j = 0; j < 3; ++j) mean[j] += v[j];
  }
  double norm = 0;
  for (int j = 0; j < 3; ++j) norm += (mean[j] / n) * (mean[j] / n);
  CHECK(std::sqrt(norm) < 0.05);
}

TEST_CASE("initial_alpha pinned values and domain") {
  CHECK(initial_alpha(1.0, 100.0, 2, 50) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(initial_alpha(0.0, 100.0, 2, 50) == 0.0);
  CHECK(initial_alpha(4.0, 25.0, 1, 100) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(initial_alpha(1.0, 0.0, 2, 50), std::invalid_argument);
  CHECK_THROWS_AS(initial_alpha(1.0, -3.0, 2, 50), std::invalid_argument);
}

TEST_CASE("drift_translate rejects non-positive epsilon") {
  ConceptPool pool;
  pool.points = PointSet::from_rows({{-1, 0}, {1, 0}});
  pool.reference_centroids = CentroidSet{PointSet::from_rows({{0, 0}})};
  Rng rng(6);
  CHECK_THROWS_AS(drift_translate(pool, 0.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(drift_translate(pool, -1.0, rng), std::invalid_argument);
}

TEST_CASE("drift_translate: 1-D hand construction hits the band") {
  ConceptPool pool;
  pool.points = PointSet::from_rows({{-1}, {1}});
  pool.reference_centroids = CentroidSet{PointSet::from_rows({{0}})};
  Rng rng(7);
  const DriftResult res = drift_translate(pool, 3.0, rng);
  // E_prev = 1, target ratio 4 within the 5% band.
  CHECK(res.achieved_ratio >= 0.95 * 4.0);
  CHECK(res.achieved_ratio <= 1.05 * 4.0);
  CHECK(res.pool.concept_id == 1);
  CHECK(res.alpha_iterations <= 50);
}

TEST_CASE("translation is a rigid per-cluster shift: scatter is preserved") {
  Rng data_rng(8);
  BaseDataSpec spec;
  spec.d = 3;
  spec.n = 600;
  spec.k_true = 4;
  ConceptPool pool;
  pool.points = gen_base(spec, data_rng);
  DistanceCounter ctr;
  const CentroidSet seed = kmpp_seed(pool.points, 4, data_rng, ctr);
  pool.reference_centroids = lloyd(pool.points, seed, {}, ctr).centroids;

  const Partition before_labels = assign(pool.points, pool.reference_centroids, ctr);
  Rng rng(9);
  const DriftResult res = drift_translate(pool, 1.0, rng);

  // Per cluster: scatter about the cluster's own mean is unchanged.
  for (std::size_t c = 0; c < 4; ++c) {
    PointSet before(3), after(3);
    for (std::size_t i = 0; i < pool.points.size(); ++i) {
      if (static_cast<std::size_t>(before_labels[i]) != c) continue;
      before.push_row(pool.points.row(i));
      after.push_row(res.pool.points.row(i));
    }
    if (before.size() < 2) continue;
    const std::vector<double> unit(before.size(), 1.0);
    const Point mb = weighted_mean(before, unit);
    const Point ma = weighted_mean(after, unit);
    const auto [sb, unused_b] = scatter_identity_check(before, {}, mb);
    const auto [sa, unused_a] = scatter_identity_check(after, {}, ma);
    CHECK(sa == doctest::Approx(sb).epsilon(1e-9));
  }
}

TEST_CASE("DriftStream: concept schedule, determinism, sane sampling") {
  DriftStreamSpec spec;
  spec.base.d = 2;
  spec.base.n = 800;
  spec.base.k_true = 3;
  spec.epsilon = 1.0;
  spec.batch_size = 50;
  spec.drift_period = 5;
  spec.k_cluster = 3;
  spec.seed = 11;

  DriftStream s1(spec), s2(spec);
  std::vector<std::int64_t> concepts;
  for (int i = 0; i < 12; ++i) {
    auto [b1, c1] = s1.next();
    auto [b2, c2] = s2.next();
    CHECK(b1.points == b2.points);
    CHECK(c1 == c2);
    CHECK(b1.points.size() == 50);
    concepts.push_back(c1);
  }
  CHECK(concepts == std::vector<std::int64_t>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 2, 2});
  CHECK(s1.drift_ratios().size() == 2);
  for (const double r : s1.drift_ratios()) {
    CHECK(r >= 0.95 * 2.0);
    CHECK(r <= 1.05 * 2.0);
  }
}

TEST_CASE("batches are i.i.d. draws from the frozen pool") {
  DriftStreamSpec spec;
  spec.base.d = 2;
  spec.base.n = 2000;
  spec.base.k_true = 2;
  spec.epsilon = 1.0;
  spec.batch_size = 100;
  spec.drift_period = 100;  // no drift in this test
  spec.k_cluster = 2;
  spec.seed = 13;
  DriftStream stream(spec);

  const PointSet& pool = stream.pool().points;
  std::vector<double> unit_pool(pool.size(), 1.0);
  const Point pool_mean = weighted_mean(pool, unit_pool);

  PointSet drawn(2);
  for (int i = 0; i < 50; ++i) {
    auto [b, c] = stream.next();
    drawn.append(b.points);
  }
  std::vector<double> unit(drawn.size(), 1.0);
  const Point mean = weighted_mean(drawn, unit);

  // Pool coordinate sd is bounded by the mixture spread (~ |means| + 1).
  double pool_var = 0.0;
  DistanceCounter ctr;
  for (std::size_t i = 0; i < pool.size(); ++i)
    pool_var += sq_dist(pool.row(i), pool_mean, ctr);
  pool_var /= static_cast<double>(pool.size());
  const double sd_mean = std::sqrt(pool_var / static_cast<double>(drawn.size()));
  CHECK(std::abs(mean[0] - pool_mean[0]) < 3 * sd_mean);
  CHECK(std::abs(mean[1] - pool_mean[1]) < 3 * sd_mean);
}

TEST_CASE("stream dump round-trips losslessly") {
  DriftStreamSpec spec;
  spec.base.d = 3;
  spec.base.n = 500;
  spec.base.k_true = 2;
  spec.epsilon = 0.5;
  spec.batch_size = 20;
  spec.drift_period = 4;
  spec.k_cluster = 2;
  spec.seed = 17;
  DriftStream stream(spec);

  StreamDump dump;
  dump.d = 3;
  dump.batch_n = spec.batch_size;
  dump.period = spec.drift_period;
  dump.epsilon = spec.epsilon;
  dump.seed = spec.seed;
  for (int i = 0; i < 9; ++i) {
    auto [b, c] = stream.next();
    dump.batches.push_back(std::move(b));
    dump.concept_ids.push_back(c);
  }

  std::stringstream buf;
  write_stream_dump(buf, dump);
  const std::string first = buf.str();
  StreamDump loaded = read_stream_dump(buf);
  CHECK(loaded.d == dump.d);
  CHECK(loaded.batch_n == dump.batch_n);
  CHECK(loaded.period == dump.period);
  CHECK(loaded.epsilon == dump.epsilon);
  CHECK(loaded.seed == dump.seed);
  REQUIRE(loaded.batches.size() == dump.batches.size());
  for (std::size_t i = 0; i < dump.batches.size(); ++i) {
    CHECK(loaded.batches[i].points == dump.batches[i].points);
    CHECK(loaded.concept_ids[i] == dump.concept_ids[i]);
  }
  std::stringstream buf2;
  write_stream_dump(buf2, loaded);
  CHECK(buf2.str() == first);
}
