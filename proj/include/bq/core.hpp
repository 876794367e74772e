#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "bq/codes.hpp"
#include "bq/random.hpp"

namespace bq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// d x n data set, one sample per column. Entries are finite.
///
/// n = 0 is representable (an empty query batch encodes to an empty code
/// set); operations that need samples check n themselves.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(Matrix data);

  Index dims() const { return data_.rows(); }
  Index samples() const { return data_.cols(); }
  const Matrix& data() const { return data_; }
  auto sample(Index i) const { return data_.col(i); }

  /// Copies the listed columns, in order.
  FeatureMatrix select(const std::vector<Index>& columns) const;

 private:
  Matrix data_;
};

/// Subtracts each row's mean; equal to M * (I - ee^T / n) without forming the n x n matrix.
Matrix center_rows(const Matrix& m);

/// cos(W^T x_i + b) for every sample: r x n, entries in [-1, 1].
Matrix cos_map(const Matrix& w, const Vector& b, const FeatureMatrix& x);

/// Bit (j, i) = 1 iff v(j, i) >= 0 (sgn(0) = +1). NaN is rejected.
BinaryCodeSet sign_quantize(const Matrix& v);

/// d x r matrix of i.i.d. N(0, 1) draws, filled column-major.
Matrix gaussian_matrix(RandomSource& rng, Index d, Index r);

/// Median Euclidean distance over all pairs of a seeded subsample of at most
/// `max_samples` columns (lower-middle element for an even pair count).
double median_pairwise_distance(const FeatureMatrix& x, std::uint64_t seed,
                                Index max_samples = 1000);

/// Seeded Fisher-Yates shuffle of 0..n-1 (swap i with rng.below(i + 1), i descending).
std::vector<Index> shuffled_indices(Index n, RandomSource& rng);

}  // namespace bq
