#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "bq/errors.hpp"
#include "bq/eval.hpp"
#include "bq/quantizer.hpp"
#include "test_util.hpp"

using namespace bq;

namespace {

RankedResult ranking_of(std::initializer_list<std::int64_t> ids) {
  RankedResult r;
  for (auto id : ids) r.neighbors.push_back({id, 0});
  return r;
}

// AP straight from the definition: precision at every relevant hit, averaged over |relevant|.
double ap_oracle(const std::vector<std::int64_t>& order, const std::set<Index>& relevant) {
  double sum = 0.0;
  for (std::size_t p = 0; p < order.size(); ++p) {
    if (!relevant.count(order[p])) continue;
    double in_top = 0.0;
    for (std::size_t q = 0; q <= p; ++q) in_top += relevant.count(order[q]) ? 1.0 : 0.0;
    sum += in_top / static_cast<double>(p + 1);
  }
  return sum / static_cast<double>(relevant.size());
}

}  // namespace

TEST_CASE("ground truth on a line") {
  Matrix db(1, 3);
  db << 0.0, 1.0, 10.0;
  Matrix q(1, 1);
  q << 0.4;
  const GroundTruth gt = ground_truth_knn(FeatureMatrix(db), FeatureMatrix(q), 2);
  CHECK(gt.relevant[0] == std::vector<Index>{0, 1});
  const GroundTruth one = ground_truth_knn(FeatureMatrix(db), FeatureMatrix(q), 1);
  CHECK(one.relevant[0] == std::vector<Index>{0});

  // equidistant 0 and 1: the lower id wins
  q << 0.5;
  CHECK(ground_truth_knn(FeatureMatrix(db), FeatureMatrix(q), 1).relevant[0] == std::vector<Index>{0});

  CHECK_THROWS_AS(ground_truth_knn(FeatureMatrix(db), FeatureMatrix(q), 3), InvalidInput);
  CHECK_THROWS_AS(ground_truth_knn(FeatureMatrix(db), FeatureMatrix(q), 0), InvalidInput);
}

TEST_CASE("ground truth excludes the query itself") {
  const FeatureMatrix db = test::random_features(1, 3, 20);
  const FeatureMatrix q = db.select(std::vector<Index>{4, 9});
  const std::vector<Index> self{4, 9};
  const GroundTruth gt = ground_truth_knn(db, q, 5, self);
  CHECK(std::find(gt.relevant[0].begin(), gt.relevant[0].end(), 4) == gt.relevant[0].end());
  CHECK(std::find(gt.relevant[1].begin(), gt.relevant[1].end(), 9) == gt.relevant[1].end());
  const GroundTruth with_self = ground_truth_knn(db, q, 5);
  CHECK(std::binary_search(with_self.relevant[0].begin(), with_self.relevant[0].end(), 4));
}

TEST_CASE("ground truth matches brute force and is nested in k") {
  const FeatureMatrix db = test::random_features(2, 4, 120);
  const FeatureMatrix q = test::random_features(3, 4, 10);
  const GroundTruth g5 = ground_truth_knn(db, q, 5);
  const GroundTruth g12 = ground_truth_knn(db, q, 12, {}, 3);
  for (Index i = 0; i < 10; ++i) {
    std::vector<std::pair<double, Index>> all;
    for (Index j = 0; j < 120; ++j) {
      double s = 0.0;
      for (Index f = 0; f < 4; ++f) s += std::pow(db.data()(f, j) - q.data()(f, i), 2);
      all.emplace_back(s, j);
    }
    std::sort(all.begin(), all.end());
    std::vector<Index> expect;
    for (int k = 0; k < 12; ++k) expect.push_back(all[static_cast<std::size_t>(k)].second);
    std::sort(expect.begin(), expect.end());
    CHECK(g12.relevant[static_cast<std::size_t>(i)] == expect);
    const auto& small = g5.relevant[static_cast<std::size_t>(i)];
    const auto& big = g12.relevant[static_cast<std::size_t>(i)];
    CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
  }
}

TEST_CASE("average precision hand case") {
  // relevant {a, c} ranked a, b, c: (1/1 + 2/3) / 2
  const std::vector<Index> rel{0, 2};
  CHECK(std::abs(average_precision(ranking_of({0, 1, 2}), rel) - 5.0 / 6.0) <= 1e-9);
  CHECK(average_precision(ranking_of({0, 2, 1}), rel) == 1.0);
  CHECK(average_precision(ranking_of({5, 6, 7}), rel) == 0.0);
  // a cutoff keeps the normalizer
  CHECK(average_precision(ranking_of({0, 1, 2}), rel, 2) == doctest::Approx(0.5));
  CHECK_THROWS_AS(average_precision(ranking_of({0}), std::vector<Index>{}), InvalidInput);
}

TEST_CASE("average precision matches the definition on random rankings") {
  RandomSource rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto perm = shuffled_indices(30, rng);
    std::vector<std::int64_t> order(perm.begin(), perm.end());
    std::set<Index> rel;
    while (rel.size() < 5) rel.insert(static_cast<Index>(rng.below(30)));
    RankedResult r;
    for (auto id : order) r.neighbors.push_back({id, 0});
    const std::vector<Index> rel_sorted(rel.begin(), rel.end());
    CHECK(std::abs(average_precision(r, rel_sorted) - ap_oracle(order, rel)) <= 1e-12);
  }
}

TEST_CASE("mean_ap") {
  const std::vector<double> aps{0.5, 1.0, 0.0};
  CHECK(mean_ap(aps) == doctest::Approx(0.5));
  CHECK_THROWS_AS(mean_ap(std::vector<double>{}), InvalidInput);
}

TEST_CASE("sweeps produce one deterministic report per cell") {
  const FeatureMatrix db = test::random_features(5, 8, 150);
  const FeatureMatrix q = test::random_features(6, 8, 15);
  const std::vector<Method> methods{Method::lsh, Method::cq, Method::itq};
  const std::vector<int> bits{4, 8};
  const auto a = sweep_bits(db, q, methods, bits, 10, 7);
  const auto b = sweep_bits(db, q, methods, bits, 10, 7);
  REQUIRE(a.size() == 6);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].error.empty());
    CHECK(a[i].map == b[i].map);
    CHECK(a[i].ap.size() == 15);
    CHECK(a[i].neighbors == 10);
    CHECK_FALSE(a[i].fit_ms.has_value());
  }

  const std::vector<Index> ks{5, 20};
  const auto n = sweep_neighbors(db, q, methods, ks, 8, 7);
  REQUIRE(n.size() == 6);
  std::set<Index> seen;
  for (const auto& r : n) seen.insert(r.neighbors);
  CHECK(seen == std::set<Index>{5, 20});
}

TEST_CASE("a failing cell is reported and the sweep continues") {
  const FeatureMatrix db = test::random_features(7, 3, 40);
  const FeatureMatrix q = test::random_features(8, 3, 5);
  const std::vector<Method> methods{Method::itq, Method::lsh};
  const std::vector<int> bits{8};  // ITQ needs r <= d
  const auto out = sweep_bits(db, q, methods, bits, 5, 1);
  REQUIRE(out.size() == 2);
  CHECK(std::isnan(out[0].map));
  CHECK_FALSE(out[0].error.empty());
  CHECK(out[1].error.empty());
}

TEST_CASE("well separated clusters give near perfect retrieval") {
  const FeatureMatrix db = test::two_clusters(9, 6, 200);
  const FeatureMatrix q = test::two_clusters(10, 6, 20);
  // each query's relevant set is exactly its own cluster of 100
  const GroundTruth gt = ground_truth_knn(db, q, 100);
  const EvalReport r = evaluate_method(db, q, gt, Method::itq, 4, 3);
  CHECK(r.error.empty());
  CHECK(r.map > 0.9);
}

TEST_CASE("evaluate_method agrees with a manual pipeline") {
  const FeatureMatrix db = test::random_features(11, 5, 100);
  const FeatureMatrix q = test::random_features(12, 5, 10);
  const GroundTruth gt = ground_truth_knn(db, q, 8);
  const EvalReport r = evaluate_method(db, q, gt, Method::cq, 16, 21);

  const QuantizerModel m = fit_quantizer(Method::cq, db, 16, 21).model;
  const BinaryCodeSet dc = m.encode(db), qc = m.encode(q);
  double total = 0.0;
  for (Index i = 0; i < 10; ++i) {
    const RankedResult ranked = rank_all(dc, qc.code(i), i);
    total += average_precision(ranked, gt.relevant[static_cast<std::size_t>(i)]);
  }
  CHECK(r.map == doctest::Approx(total / 10.0).epsilon(1e-12));
  CHECK(cell_seed(1, Method::cq, 16, 8) != cell_seed(1, Method::cq, 16, 9));
}
