#include "bq/codes.hpp"

#include <string>

#include "bq/errors.hpp"

namespace bq {

int words_for_bits(int r) { return (r + 63) / 64; }

namespace {

std::uint64_t padding_mask(int r) {
  const int used = r % 64;
  return used == 0 ? 0ULL : ~((1ULL << used) - 1ULL);
}

}  // namespace

BinaryCodeSet::BinaryCodeSet(int r, std::int64_t n)
    : r_(r), n_(n), words_per_code_(words_for_bits(r)) {
  if (r < 1) throw InvalidInput("code length must be at least 1 bit");
  if (n < 0) throw InvalidInput("code count must be non-negative");
  words_.assign(static_cast<std::size_t>(n) * words_per_code_, 0ULL);
}

BinaryCodeSet::BinaryCodeSet(int r, std::int64_t n, std::vector<std::uint64_t> words)
    : BinaryCodeSet(r, 0) {
  if (n < 0) throw InvalidInput("code count must be non-negative");
  n_ = n;
  if (words.size() != static_cast<std::size_t>(n) * words_per_code_) {
    throw InvalidInput("expected " + std::to_string(n * words_per_code_) + " words for " +
                       std::to_string(n) + " codes of " + std::to_string(r) + " bits, got " +
                       std::to_string(words.size()));
  }
  const std::uint64_t mask = padding_mask(r);
  if (mask != 0) {
    for (std::int64_t i = 0; i < n; ++i) {
      if (words[(i + 1) * words_per_code_ - 1] & mask) {
        throw InvalidInput("code " + std::to_string(i) + " has non-zero padding bits");
      }
    }
  }
  words_ = std::move(words);
}

std::span<const std::uint64_t> BinaryCodeSet::code(std::int64_t i) const {
  return std::span<const std::uint64_t>(words_).subspan(
      static_cast<std::size_t>(i) * words_per_code_, words_per_code_);
}

bool BinaryCodeSet::bit(int j, std::int64_t i) const {
  return (words_[i * words_per_code_ + j / 64] >> (j % 64)) & 1ULL;
}

void BinaryCodeSet::set_bit(int j, std::int64_t i, bool value) {
  std::uint64_t& w = words_[i * words_per_code_ + j / 64];
  const std::uint64_t m = 1ULL << (j % 64);
  w = value ? (w | m) : (w & ~m);
}

BinaryCodeSet pack_bits(const BitMatrix& bits) {
  const int r = static_cast<int>(bits.rows());
  BinaryCodeSet codes(r, bits.cols());
  for (Eigen::Index i = 0; i < bits.cols(); ++i) {
    for (int j = 0; j < r; ++j) {
      const std::uint8_t v = bits(j, i);
      if (v > 1) {
        throw InvalidInput("bit matrix entry (" + std::to_string(j) + ", " + std::to_string(i) +
                           ") is " + std::to_string(v) + ", expected 0 or 1");
      }
      if (v) codes.set_bit(j, i, true);
    }
  }
  return codes;
}

}  // namespace bq
