#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace bq {

using BitMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// n binary codes of r bits each.
///
/// Bit j of a code lives in bit (j % 64) of word j / 64, least significant
/// first. Every code occupies ceil(r / 64) words; padding bits above r are
/// always zero so XOR + popcount is exact.
class BinaryCodeSet {
 public:
  BinaryCodeSet() = default;
  /// All-zero codes.
  BinaryCodeSet(int r, std::int64_t n);
  /// Adopts packed words; throws InvalidInput on size mismatch or set padding bits.
  BinaryCodeSet(int r, std::int64_t n, std::vector<std::uint64_t> words);

  int bits() const { return r_; }
  std::int64_t size() const { return n_; }
  bool empty() const { return n_ == 0; }
  int words_per_code() const { return words_per_code_; }

  std::span<const std::uint64_t> code(std::int64_t i) const;
  std::span<const std::uint64_t> words() const { return words_; }

  bool bit(int j, std::int64_t i) const;
  void set_bit(int j, std::int64_t i, bool value);

  friend bool operator==(const BinaryCodeSet&, const BinaryCodeSet&) = default;

 private:
  int r_ = 0;
  std::int64_t n_ = 0;
  int words_per_code_ = 0;
  std::vector<std::uint64_t> words_;
};

int words_for_bits(int r);

/// Packs an r x n 0/1 matrix; column i becomes code i.
BinaryCodeSet pack_bits(const BitMatrix& bits);

}  // namespace bq
