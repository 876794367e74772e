#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bq/codes.hpp"

namespace bq {

struct Neighbor {
  std::int64_t id;
  std::uint32_t distance;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Database ids ordered by (Hamming distance, id), both ascending.
struct RankedResult {
  std::int64_t query = 0;
  std::vector<Neighbor> neighbors;
};

/// popcount(a XOR b) over all words. Throws InvalidInput on length mismatch.
std::uint32_t hamming(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

/// Full exhaustive ranking of the database against one query code.
RankedResult rank_all(const BinaryCodeSet& db, std::span<const std::uint64_t> query,
                      std::int64_t query_id = 0);

/// First k entries of rank_all. Requires 1 <= k <= db.size().
RankedResult top_k(const BinaryCodeSet& db, std::span<const std::uint64_t> query, std::int64_t k,
                   std::int64_t query_id = 0);

}  // namespace bq
