#include "bq/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "bq/errors.hpp"
#include "bq/quantizer.hpp"
#include "parallel.hpp"

namespace bq {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Index self_of(std::span<const Index> self_ids, Index q) {
  return self_ids.empty() ? kNoSelf : self_ids[static_cast<std::size_t>(q)];
}

}  // namespace

GroundTruth ground_truth_knn(const FeatureMatrix& db, const FeatureMatrix& queries, Index k,
                             std::span<const Index> self_ids, int threads) {
  if (db.dims() != queries.dims()) {
    throw InvalidInput("database has " + std::to_string(db.dims()) + " features, queries have " +
                       std::to_string(queries.dims()));
  }
  if (k < 1 || k >= db.samples()) {
    throw InvalidInput("ground truth needs 1 <= k < n_db (k = " + std::to_string(k) +
                       ", n_db = " + std::to_string(db.samples()) + ")");
  }
  if (!self_ids.empty() && static_cast<Index>(self_ids.size()) != queries.samples()) {
    throw InvalidInput("self id list length differs from query count");
  }

  GroundTruth gt;
  gt.k = k;
  gt.relevant.resize(static_cast<std::size_t>(queries.samples()));
  detail::parallel_for(queries.samples(), threads, [&](std::int64_t q) {
    const Index self = self_of(self_ids, q);
    std::vector<std::pair<double, Index>> dist;
    dist.reserve(static_cast<std::size_t>(db.samples()));
    for (Index i = 0; i < db.samples(); ++i) {
      if (i == self) continue;
      dist.emplace_back((db.sample(i) - queries.sample(q)).squaredNorm(), i);
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    auto& ids = gt.relevant[static_cast<std::size_t>(q)];
    ids.reserve(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) ids.push_back(dist[static_cast<std::size_t>(i)].second);
    std::sort(ids.begin(), ids.end());
  });
  return gt;
}

double average_precision(const RankedResult& ranking, std::span<const Index> relevant,
                         std::optional<Index> cutoff) {
  if (relevant.empty()) throw InvalidInput("average_precision: relevant set is empty");
  const std::size_t depth =
      cutoff ? std::min<std::size_t>(static_cast<std::size_t>(std::max<Index>(*cutoff, 0)),
                                     ranking.neighbors.size())
             : ranking.neighbors.size();
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t p = 0; p < depth; ++p) {
    if (std::binary_search(relevant.begin(), relevant.end(), ranking.neighbors[p].id)) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(p + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

double mean_ap(std::span<const double> aps) {
  if (aps.empty()) throw InvalidInput("mean_ap: no queries");
  double sum = 0.0;
  for (double a : aps) sum += a;
  return sum / static_cast<double>(aps.size());
}

std::vector<double> evaluate_codes(const BinaryCodeSet& db, const BinaryCodeSet& queries,
                                   const GroundTruth& truth, std::span<const Index> self_ids,
                                   std::optional<Index> cutoff, int threads) {
  if (db.bits() != queries.bits()) {
    throw InvalidInput("database codes have " + std::to_string(db.bits()) +
                       " bits, query codes have " + std::to_string(queries.bits()));
  }
  if (static_cast<Index>(truth.relevant.size()) != queries.size()) {
    throw InvalidInput("ground truth covers " + std::to_string(truth.relevant.size()) +
                       " queries, got " + std::to_string(queries.size()));
  }
  std::vector<double> ap(static_cast<std::size_t>(queries.size()));
  detail::parallel_for(queries.size(), threads, [&](std::int64_t q) {
    RankedResult ranking = rank_all(db, queries.code(q), q);
    const Index self = self_of(self_ids, q);
    if (self != kNoSelf) std::erase_if(ranking.neighbors, [&](const Neighbor& n) { return n.id == self; });
    ap[static_cast<std::size_t>(q)] =
        average_precision(ranking, truth.relevant[static_cast<std::size_t>(q)], cutoff);
  });
  return ap;
}

std::uint64_t cell_seed(std::uint64_t master, Method method, int bits, Index neighbors) {
  return derive_seed(master, {static_cast<std::uint64_t>(method), static_cast<std::uint64_t>(bits),
                              static_cast<std::uint64_t>(neighbors)});
}

EvalReport evaluate_method(const FeatureMatrix& db, const FeatureMatrix& queries,
                           const GroundTruth& truth, Method method, int bits, std::uint64_t seed,
                           const SweepOptions& options) {
  EvalReport report;
  report.method = std::string(to_string(method));
  report.bits = bits;
  report.neighbors = truth.k;
  report.seed = seed;
  try {
    auto t0 = Clock::now();
    const FitResult fit = fit_quantizer(method, db, bits, seed, options.fit);
    const double fit_ms = elapsed_ms(t0);

    t0 = Clock::now();
    const BinaryCodeSet db_codes = fit.model.encode(db);
    const BinaryCodeSet q_codes = fit.model.encode(queries);
    const double encode_ms = elapsed_ms(t0);

    t0 = Clock::now();
    report.ap = evaluate_codes(db_codes, q_codes, truth, {}, options.rank_cutoff, options.threads);
    report.map = mean_ap(report.ap);
    const double query_ms = elapsed_ms(t0);

    if (options.timing) {
      report.fit_ms = fit_ms;
      report.encode_ms = encode_ms;
      report.query_ms = query_ms;
    }
  } catch (const std::exception& e) {
    report.ap.clear();
    report.map = std::numeric_limits<double>::quiet_NaN();
    report.error = e.what();
  }
  return report;
}

std::vector<EvalReport> sweep_bits(const FeatureMatrix& db, const FeatureMatrix& queries,
                                   std::span<const Method> methods, std::span<const int> bits,
                                   Index k, std::uint64_t seed, const SweepOptions& options) {
  if (bits.empty()) throw InvalidInput("sweep_bits: bit list is empty");
  if (methods.empty()) throw InvalidInput("sweep_bits: method list is empty");
  const GroundTruth truth = ground_truth_knn(db, queries, k, {}, options.threads);
  std::vector<EvalReport> reports;
  for (Method m : methods)
    for (int r : bits)
      reports.push_back(evaluate_method(db, queries, truth, m, r, cell_seed(seed, m, r, k), options));
  return reports;
}

std::vector<EvalReport> sweep_neighbors(const FeatureMatrix& db, const FeatureMatrix& queries,
                                        std::span<const Method> methods,
                                        std::span<const Index> ks, int bits, std::uint64_t seed,
                                        const SweepOptions& options) {
  if (ks.empty()) throw InvalidInput("sweep_neighbors: neighbor list is empty");
  if (methods.empty()) throw InvalidInput("sweep_neighbors: method list is empty");
  std::vector<EvalReport> reports;
  for (Index k : ks) {
    const GroundTruth truth = ground_truth_knn(db, queries, k, {}, options.threads);
    for (Method m : methods)
      reports.push_back(evaluate_method(db, queries, truth, m, bits, cell_seed(seed, m, bits, k), options));
  }
  return reports;
}

}  // namespace bq
