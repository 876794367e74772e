#include "bq/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bq/errors.hpp"

namespace bq {

FeatureMatrix::FeatureMatrix(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1) throw InvalidInput("feature matrix needs at least one feature row");
  if (!data_.allFinite()) throw InvalidInput("feature matrix contains NaN or Inf");
}

FeatureMatrix FeatureMatrix::select(const std::vector<Index>& columns) const {
  Matrix out(dims(), static_cast<Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] < 0 || columns[i] >= samples()) {
      throw InvalidInput("sample index " + std::to_string(columns[i]) + " out of range");
    }
    out.col(static_cast<Index>(i)) = data_.col(columns[i]);
  }
  return FeatureMatrix(std::move(out));
}

Matrix center_rows(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw InvalidInput("center_rows: empty matrix");
  const Vector mean = m.rowwise().mean();
  return m.colwise() - mean;
}

Matrix cos_map(const Matrix& w, const Vector& b, const FeatureMatrix& x) {
  if (w.rows() != x.dims()) {
    throw InvalidInput("cos_map: projection has " + std::to_string(w.rows()) +
                       " rows but data has " + std::to_string(x.dims()) + " features");
  }
  if (b.size() != w.cols()) throw InvalidInput("cos_map: offset length differs from code length");
  Matrix proj = w.transpose() * x.data();
  proj.colwise() += b;
  return proj.array().cos().matrix();
}

BinaryCodeSet sign_quantize(const Matrix& v) {
  if (v.rows() < 1) throw InvalidInput("sign_quantize: need at least one row");
  BinaryCodeSet codes(static_cast<int>(v.rows()), v.cols());
  for (Index i = 0; i < v.cols(); ++i) {
    for (Index j = 0; j < v.rows(); ++j) {
      const double x = v(j, i);
      if (std::isnan(x)) {
        throw InvalidInput("sign_quantize: NaN at (" + std::to_string(j) + ", " +
                           std::to_string(i) + ")");
      }
      if (x >= 0.0) codes.set_bit(static_cast<int>(j), i, true);
    }
  }
  return codes;
}

Matrix gaussian_matrix(RandomSource& rng, Index d, Index r) {
  if (d < 1 || r < 1) throw InvalidInput("gaussian_matrix: dimensions must be positive");
  Matrix out(d, r);
  for (Index c = 0; c < r; ++c)
    for (Index i = 0; i < d; ++i) out(i, c) = rng.normal();
  return out;
}

std::vector<Index> shuffled_indices(Index n, RandomSource& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

double median_pairwise_distance(const FeatureMatrix& x, std::uint64_t seed, Index max_samples) {
  const Index n = x.samples();
  if (n < 2) throw InvalidInput("median_pairwise_distance: need at least two samples");
  std::vector<Index> pick;
  if (n <= max_samples) {
    pick.resize(static_cast<std::size_t>(n));
    std::iota(pick.begin(), pick.end(), Index{0});
  } else {
    RandomSource rng(seed);
    pick = shuffled_indices(n, rng);
    pick.resize(static_cast<std::size_t>(max_samples));
    std::sort(pick.begin(), pick.end());
  }
  std::vector<double> dist;
  dist.reserve(pick.size() * (pick.size() - 1) / 2);
  for (std::size_t a = 0; a < pick.size(); ++a)
    for (std::size_t c = a + 1; c < pick.size(); ++c)
      dist.push_back((x.sample(pick[a]) - x.sample(pick[c])).norm());
  const auto mid = dist.begin() + static_cast<std::ptrdiff_t>((dist.size() - 1) / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  return *mid;
}

}  // namespace bq
