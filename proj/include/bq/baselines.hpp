#pragma once

#include <cstdint>
#include <vector>

#include "bq/core.hpp"
#include "bq/fit_options.hpp"
#include "bq/model.hpp"

namespace bq {

/// Random hyperplanes: W ~ N(0, 1), b = 0, bits sgn(W^T x).
QuantizerModel lsh_fit(const FeatureMatrix& x, int r, std::uint64_t seed,
                       const FitOptions& options = {});

/// Cosine random mapping: W ~ gamma * N(0, 1), b ~ U[0, 2 pi), bits sgn(cos(W^T x + b)).
QuantizerModel cq_fit(const FeatureMatrix& x, int r, std::uint64_t seed,
                      const FitOptions& options = {});

/// Spectral hashing with the analytic eigenfunctions of a uniform box in PCA space.
/// Each bit is one mode (principal direction i, order k) with eigenvalue
/// (k pi / range_i)^2; the r smallest are kept (ties in enumeration order).
QuantizerModel sh_fit(const FeatureMatrix& x, int r, std::uint64_t seed,
                      const FitOptions& options = {});

/// Iterative quantization: PCA to r dimensions, then alternate B = sgn(V R) and
/// the orthogonal Procrustes update of R. Starts from a seeded random rotation.
QuantizerModel itq_fit(const FeatureMatrix& x, int r, std::uint64_t seed,
                       const FitOptions& options = {});

struct ItqRefinement {
  Matrix rotation;
  std::vector<double> loss;  // ||B - V R||_F^2 at the start of each iteration
};

/// Alternating minimization of ||B - V R||_F^2 over B in {-1, +1}^{n x r} and
/// orthogonal R. Stops early once the loss is exactly zero.
ItqRefinement itq_refine(const Matrix& v, Matrix r0, int iters);

/// Top-k principal directions of the (already mean-removed) sample covariance,
/// eigenvalues descending. Each eigenvector is signed so its largest-magnitude
/// entry is positive. Throws FitError when the covariance rank is below k.
struct Pca {
  Matrix basis;       // d x k
  Vector eigenvalues; // k
};
Pca principal_directions(const Matrix& centered, Index k);

/// The fitted model's encode rule applied to x.
BinaryCodeSet baseline_encode(const QuantizerModel& model, const FeatureMatrix& x);

}  // namespace bq
