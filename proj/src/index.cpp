#include "bq/index.hpp"

#include <bit>
#include <string>

#include "bq/errors.hpp"

namespace bq {

std::uint32_t hamming(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) {
    throw InvalidInput("hamming: codes have " + std::to_string(a.size()) + " and " +
                       std::to_string(b.size()) + " words");
  }
  std::uint32_t dist = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dist += std::popcount(a[i] ^ b[i]);
  return dist;
}

namespace {

// Counting sort on distance; ids come out ascending within each bucket.
std::vector<Neighbor> rank_by_distance(const BinaryCodeSet& db,
                                       std::span<const std::uint64_t> query) {
  if (static_cast<int>(query.size()) != db.words_per_code()) {
    throw InvalidInput("query code has " + std::to_string(query.size()) +
                       " words, database codes have " + std::to_string(db.words_per_code()));
  }
  const auto n = static_cast<std::size_t>(db.size());
  std::vector<std::uint32_t> dist(n);
  std::vector<std::size_t> count(static_cast<std::size_t>(db.bits()) + 2, 0);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = hamming(db.code(static_cast<std::int64_t>(i)), query);
    ++count[dist[i] + 1];
  }
  for (std::size_t k = 1; k < count.size(); ++k) count[k] += count[k - 1];
  std::vector<Neighbor> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[count[dist[i]]++] = Neighbor{static_cast<std::int64_t>(i), dist[i]};
  }
  return out;
}

}  // namespace

RankedResult rank_all(const BinaryCodeSet& db, std::span<const std::uint64_t> query,
                      std::int64_t query_id) {
  return {query_id, rank_by_distance(db, query)};
}

RankedResult top_k(const BinaryCodeSet& db, std::span<const std::uint64_t> query, std::int64_t k,
                   std::int64_t query_id) {
  if (k < 1 || k > db.size()) {
    throw InvalidInput("k = " + std::to_string(k) + " must lie in [1, " +
                       std::to_string(db.size()) + "]");
  }
  RankedResult out{query_id, rank_by_distance(db, query)};
  out.neighbors.resize(static_cast<std::size_t>(k));
  return out;
}

}  // namespace bq
