#include "bq/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "bq/errors.hpp"

namespace bq {

namespace {

constexpr std::uint64_t kOffsetStream = 0x6F666673;    // "offs"
constexpr std::uint64_t kRotationStream = 0x726F7461;  // "rota"

void check_fit_args(const FeatureMatrix& x, int r) {
  if (r < 1) throw InvalidInput("code length must be at least 1 bit");
  if (x.samples() < 1) throw FitError("cannot fit on an empty data set");
}

QuantizerModel base_model(Method method, const FeatureMatrix& x, std::uint64_t seed,
                          const FitOptions& options) {
  QuantizerModel m;
  m.method = method;
  m.seed = seed;
  m.preprocess = Preprocessing::fit(options.preprocess, x);
  return m;
}

}  // namespace

Pca principal_directions(const Matrix& centered, Index k) {
  const Index d = centered.rows();
  const Matrix cov = centered * centered.transpose() / static_cast<double>(centered.cols());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw FitError("covariance eigendecomposition failed");

  const Vector& values = eig.eigenvalues();  // ascending
  const double largest = values(d - 1);
  const double tol = std::max(largest, 0.0) * 1e-10;
  Index rank = 0;
  for (Index i = 0; i < d; ++i)
    if (largest > 0.0 && values(i) > tol) ++rank;
  if (rank < k) {
    throw FitError("covariance rank " + std::to_string(rank) + " is below the required " +
                   std::to_string(k));
  }

  Pca pca;
  pca.basis.resize(d, k);
  pca.eigenvalues.resize(k);
  for (Index c = 0; c < k; ++c) {
    Vector v = eig.eigenvectors().col(d - 1 - c);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    pca.basis.col(c) = v;
    pca.eigenvalues(c) = values(d - 1 - c);
  }
  return pca;
}

QuantizerModel lsh_fit(const FeatureMatrix& x, int r, std::uint64_t seed, const FitOptions& options) {
  check_fit_args(x, r);
  QuantizerModel m = base_model(Method::lsh, x, seed, options);
  RandomSource rng(seed);
  m.w = gaussian_matrix(rng, x.dims(), r);
  m.b = Vector::Zero(r);
  return m;
}

QuantizerModel cq_fit(const FeatureMatrix& x, int r, std::uint64_t seed, const FitOptions& options) {
  check_fit_args(x, r);
  QuantizerModel m = base_model(Method::cq, x, seed, options);
  const FeatureMatrix xp = m.preprocess.apply(x);
  m.bandwidth = x.samples() >= 2 ? resolve_bandwidth(options, xp, seed) : options.bandwidth.value_or(1.0);
  RandomSource rng(seed);
  m.w = m.bandwidth * gaussian_matrix(rng, x.dims(), r);
  RandomSource offsets(derive_seed(seed, {kOffsetStream}));
  m.b.resize(r);
  for (Index j = 0; j < r; ++j) m.b(j) = 2.0 * std::numbers::pi * offsets.uniform();
  return m;
}

QuantizerModel sh_fit(const FeatureMatrix& x, int r, std::uint64_t seed, const FitOptions& options) {
  check_fit_args(x, r);
  if (x.samples() <= r) {
    throw FitError("spectral hashing needs more samples than bits (n = " +
                   std::to_string(x.samples()) + ", r = " + std::to_string(r) + ")");
  }
  QuantizerModel m = base_model(Method::sh, x, seed, options);
  const FeatureMatrix xp = m.preprocess.apply(x);
  const Vector mean = xp.data().rowwise().mean();
  const Matrix centered = xp.data().colwise() - mean;

  const Index npca = std::min<Index>(r, x.dims());
  const Pca pca = principal_directions(centered, npca);
  const Matrix y = pca.basis.transpose() * centered;  // npca x n
  const Vector lo = y.rowwise().minCoeff();
  const Vector hi = y.rowwise().maxCoeff();
  const Vector range = hi - lo;
  const double widest = range.maxCoeff();

  std::vector<ShMode> modes;
  for (Index i = 0; i < npca; ++i) {
    const auto max_mode = static_cast<std::uint32_t>(std::ceil((r + 1) * range(i) / widest));
    for (std::uint32_t k = 1; k < max_mode; ++k) {
      const double omega = k * std::numbers::pi / range(i);
      modes.push_back({static_cast<std::uint32_t>(i), k, omega * omega});
    }
  }
  std::stable_sort(modes.begin(), modes.end(),
                   [](const ShMode& a, const ShMode& b) { return a.eigenvalue < b.eigenvalue; });
  modes.resize(static_cast<std::size_t>(r));

  // sin(omega (y - lo) + pi/2) = cos(omega pc^T (x - mean) - omega lo)
  m.w.resize(x.dims(), r);
  m.b.resize(r);
  for (Index j = 0; j < r; ++j) {
    const ShMode& mode = modes[static_cast<std::size_t>(j)];
    const double omega = mode.order * std::numbers::pi / range(mode.dim);
    m.w.col(j) = omega * pca.basis.col(mode.dim);
    m.b(j) = -omega * (pca.basis.col(mode.dim).dot(mean) + lo(mode.dim));
  }
  m.sh = ShExtras{pca.basis, mean, lo, hi, std::move(modes)};
  return m;
}

ItqRefinement itq_refine(const Matrix& v, Matrix r0, int iters) {
  if (r0.rows() != v.cols() || r0.cols() != v.cols()) {
    throw InvalidInput("itq_refine: rotation must be r x r with r = columns of V");
  }
  ItqRefinement out{std::move(r0), {}};
  for (int it = 0; it < iters; ++it) {
    const Matrix z = v * out.rotation;
    const Matrix b = z.unaryExpr([](double t) { return t >= 0.0 ? 1.0 : -1.0; });
    const double loss = (b - z).squaredNorm();
    out.loss.push_back(loss);
    if (loss == 0.0) break;
    // argmin_R ||B - V R|| over orthogonal R: V^T B = U S Q^T gives R = U Q^T
    Eigen::JacobiSVD<Matrix> svd(v.transpose() * b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.rotation = svd.matrixU() * svd.matrixV().transpose();
  }
  return out;
}

QuantizerModel itq_fit(const FeatureMatrix& x, int r, std::uint64_t seed, const FitOptions& options) {
  check_fit_args(x, r);
  if (x.samples() <= r) {
    throw FitError("ITQ needs more samples than bits (n = " + std::to_string(x.samples()) +
                   ", r = " + std::to_string(r) + ")");
  }
  if (r > x.dims()) {
    throw FitError("ITQ needs r <= d (r = " + std::to_string(r) + ", d = " +
                   std::to_string(x.dims()) + ")");
  }
  if (options.itq_iters < 1) throw InvalidInput("itq_iters must be positive");
  QuantizerModel m = base_model(Method::itq, x, seed, options);
  const FeatureMatrix xp = m.preprocess.apply(x);
  const Vector mean = xp.data().rowwise().mean();
  const Matrix centered = xp.data().colwise() - mean;
  const Pca pca = principal_directions(centered, r);
  const Matrix v = centered.transpose() * pca.basis;  // n x r

  RandomSource rng(derive_seed(seed, {kRotationStream}));
  Eigen::JacobiSVD<Matrix> init(gaussian_matrix(rng, r, r), Eigen::ComputeFullU);
  ItqRefinement refined = itq_refine(v, init.matrixU(), options.itq_iters);

  m.w = pca.basis * refined.rotation;
  m.b = -(m.w.transpose() * mean);
  m.rotation = std::move(refined.rotation);
  m.pca_basis = pca.basis;
  return m;
}

BinaryCodeSet baseline_encode(const QuantizerModel& model, const FeatureMatrix& x) {
  return model.encode(x);
}

}  // namespace bq
