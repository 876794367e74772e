#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bq/codes.hpp"
#include "bq/core.hpp"
#include "bq/fit_options.hpp"
#include "bq/index.hpp"
#include "bq/model.hpp"

namespace bq {

/// Marks a query with no counterpart in the database.
inline constexpr Index kNoSelf = -1;

/// Euclidean k nearest database ids per query, sorted ascending by id.
struct GroundTruth {
  Index k = 0;
  std::vector<std::vector<Index>> relevant;
};

/// Exact k-NN by squared Euclidean distance, ties broken by ascending id.
/// `self_ids[q]`, when given, is the database id of query q (or kNoSelf); that
/// id is never counted as a neighbor of q. Requires k < n_db.
GroundTruth ground_truth_knn(const FeatureMatrix& db, const FeatureMatrix& queries, Index k,
                             std::span<const Index> self_ids = {}, int threads = 1);

/// (1 / |relevant|) * sum over ranks p holding a relevant id of (relevant in top p) / p.
/// `relevant` must be sorted ascending. With `cutoff`, only the first `cutoff`
/// ranks contribute; the normalizer stays |relevant|.
double average_precision(const RankedResult& ranking, std::span<const Index> relevant,
                         std::optional<Index> cutoff = std::nullopt);

double mean_ap(std::span<const double> aps);

/// Per-query AP of Hamming rankings against ground truth. A query's own
/// database id (from `self_ids`) is removed from its ranking.
std::vector<double> evaluate_codes(const BinaryCodeSet& db, const BinaryCodeSet& queries,
                                   const GroundTruth& truth, std::span<const Index> self_ids = {},
                                   std::optional<Index> cutoff = std::nullopt, int threads = 1);

struct EvalReport {
  std::string method;
  int bits = 0;
  Index neighbors = 0;
  std::uint64_t seed = 0;
  std::vector<double> ap;
  double map = 0.0;
  std::optional<double> fit_ms;
  std::optional<double> encode_ms;
  std::optional<double> query_ms;
  std::string error;  // non-empty when the cell failed; map is NaN then
};

struct SweepOptions {
  FitOptions fit;
  std::optional<Index> rank_cutoff;  // truncate AP at this depth
  int threads = 1;
  bool timing = false;
};

/// Seed of one sweep cell: derive_seed(master, {method, bits, neighbors}).
std::uint64_t cell_seed(std::uint64_t master, Method method, int bits, Index neighbors);

/// Fits on db, encodes both sets, ranks every query and scores it against `truth`.
EvalReport evaluate_method(const FeatureMatrix& db, const FeatureMatrix& queries,
                           const GroundTruth& truth, Method method, int bits, std::uint64_t seed,
                           const SweepOptions& options = {});

/// One report per (method, bits) with k fixed. Ground truth is computed once.
/// A failing fit is reported in its cell and the sweep continues.
std::vector<EvalReport> sweep_bits(const FeatureMatrix& db, const FeatureMatrix& queries,
                                   std::span<const Method> methods, std::span<const int> bits,
                                   Index k, std::uint64_t seed, const SweepOptions& options = {});

/// One report per (method, k) with the code length fixed; ground truth per k.
std::vector<EvalReport> sweep_neighbors(const FeatureMatrix& db, const FeatureMatrix& queries,
                                        std::span<const Method> methods,
                                        std::span<const Index> ks, int bits, std::uint64_t seed,
                                        const SweepOptions& options = {});

}  // namespace bq
