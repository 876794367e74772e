#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bq/core.hpp"
#include "bq/errors.hpp"
#include "bq/model.hpp"
#include "test_util.hpp"

using namespace bq;

TEST_CASE("center_rows subtracts row means") {
  Matrix m(2, 3);
  m << 1, 2, 3,
       5, 5, 5;
  const Matrix c = center_rows(m);
  CHECK(c(0, 0) == doctest::Approx(-1.0));
  CHECK(c(0, 1) == doctest::Approx(0.0));
  CHECK(c(0, 2) == doctest::Approx(1.0));
  CHECK(c.row(1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("center_rows is idempotent and matches the explicit centering matrix") {
  RandomSource rng(11);
  const Matrix m = test::uniform_matrix(rng, 4, 9, -5.0, 5.0);
  const Matrix once = center_rows(m);
  CHECK((center_rows(once) - once).cwiseAbs().maxCoeff() < 1e-12);

  const Index n = m.cols();
  const Matrix pi = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
  CHECK((m * pi - once).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("center_rows row sums vanish on random input") {
  RandomSource rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.below(200));
    const Matrix m = test::uniform_matrix(rng, 3, n, -1e3, 1e3);
    const Matrix c = center_rows(m);
    const double bound = 1e-9 * static_cast<double>(n) * m.cwiseAbs().maxCoeff();
    for (Index r = 0; r < c.rows(); ++r) CHECK(std::abs(c.row(r).sum()) <= bound);
  }
}

TEST_CASE("center_rows rejects empty input") {
  CHECK_THROWS_AS(center_rows(Matrix(0, 3)), InvalidInput);
  CHECK_THROWS_AS(center_rows(Matrix(2, 0)), InvalidInput);
}

TEST_CASE("cos_map values") {
  const FeatureMatrix x = test::random_features(1, 3, 5);
  const Matrix ones = cos_map(Matrix::Zero(3, 4), Vector::Zero(4), x);
  CHECK((ones.array() == 1.0).all());

  Matrix w(1, 1);
  w << 1.0;
  Matrix one_point(1, 1);
  one_point << std::numbers::pi;
  CHECK(cos_map(w, Vector::Zero(1), FeatureMatrix(one_point))(0, 0) == doctest::Approx(-1.0));

  RandomSource rng(3);
  const Matrix wr = 10.0 * gaussian_matrix(rng, 3, 16);
  const Vector br = 10.0 * gaussian_matrix(rng, 16, 1);
  const Matrix v = cos_map(wr, br, x);
  CHECK(v.maxCoeff() <= 1.0 + 1e-12);
  CHECK(v.minCoeff() >= -1.0 - 1e-12);

  CHECK_THROWS_AS(cos_map(Matrix::Zero(2, 4), Vector::Zero(4), x), InvalidInput);
}

TEST_CASE("sign_quantize tie convention and NaN") {
  Matrix v(3, 1);
  v << 0.5, -0.3, 0.0;
  const BinaryCodeSet codes = sign_quantize(v);
  CHECK(codes.bit(0, 0));
  CHECK_FALSE(codes.bit(1, 0));
  CHECK(codes.bit(2, 0));

  v(1, 0) = std::nan("");
  CHECK_THROWS_AS(sign_quantize(v), InvalidInput);
}

TEST_CASE("sign_quantize matches an elementwise loop") {
  RandomSource rng(5);
  const Matrix v = test::uniform_matrix(rng, 70, 40);
  const BinaryCodeSet codes = sign_quantize(v);
  for (Index i = 0; i < v.cols(); ++i)
    for (Index j = 0; j < v.rows(); ++j) {
      const bool expect = !(v(j, i) < 0.0);
      CHECK(codes.bit(static_cast<int>(j), i) == expect);
    }
}

TEST_CASE("sign of cos_map is unchanged by shifting an offset by 2 pi") {
  RandomSource rng(21);
  const FeatureMatrix x = test::random_features(22, 6, 200);
  const Matrix w = gaussian_matrix(rng, 6, 12);
  Vector b(12);
  for (Index j = 0; j < 12; ++j) b(j) = 2.0 * std::numbers::pi * rng.uniform();
  const BinaryCodeSet base = sign_quantize(cos_map(w, b, x));
  for (Index j = 0; j < 12; ++j) {
    Vector shifted = b;
    shifted(j) += 2.0 * std::numbers::pi;
    CHECK(sign_quantize(cos_map(w, shifted, x)) == base);
  }
}

TEST_CASE("gaussian_matrix determinism and moments") {
  RandomSource a(42), b(42), c(43);
  const Matrix ma = gaussian_matrix(a, 200, 200);
  const Matrix mb = gaussian_matrix(b, 200, 200);
  const Matrix mc = gaussian_matrix(c, 200, 200);
  CHECK(ma == mb);
  CHECK(ma != mc);

  // 40,000 draws: sd(mean) = 0.005, sd(variance) ~ 0.007
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 42ULL}) {
    RandomSource rng(seed);
    const Matrix m = gaussian_matrix(rng, 200, 200);
    const double mean = m.mean();
    const double var = (m.array() - mean).square().sum() / static_cast<double>(m.size() - 1);
    CHECK(std::abs(mean) <= 0.02);
    CHECK(var >= 0.95);
    CHECK(var <= 1.05);
  }
  RandomSource z(1);
  CHECK_THROWS_AS(gaussian_matrix(z, 0, 3), InvalidInput);
}

TEST_CASE("random source reference stream") {
  // xoshiro256** seeded by splitmix64(0); first splitmix64 output of 0 is a well-known constant
  std::uint64_t sm = 0;
  CHECK(splitmix64(sm) == 0xE220A8397B1DCDAFULL);

  RandomSource rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.below(10) < 10);
  }
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
}

TEST_CASE("shuffled_indices is a seeded permutation") {
  RandomSource a(9), b(9);
  auto p = shuffled_indices(100, a);
  CHECK(p == shuffled_indices(100, b));
  std::sort(p.begin(), p.end());
  for (Index i = 0; i < 100; ++i) CHECK(p[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("median_pairwise_distance on a small set") {
  Matrix m(1, 4);
  m << 0, 1, 3, 7;
  // pair distances 1 2 3 4 6 7 -> lower middle 3
  CHECK(median_pairwise_distance(FeatureMatrix(m), 0) == doctest::Approx(3.0));
}

TEST_CASE("feature matrix validation") {
  Matrix m = Matrix::Ones(2, 2);
  m(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(FeatureMatrix{m}, InvalidInput);
  CHECK_THROWS_AS(FeatureMatrix{Matrix(0, 3)}, InvalidInput);
  CHECK(FeatureMatrix(Matrix(3, 0)).samples() == 0);
}

TEST_CASE("preprocessing stores and re-applies statistics") {
  Matrix m(2, 4);
  m << 1, 2, 3, 4,
       7, 7, 7, 7;
  const FeatureMatrix x(m);
  const auto center = Preprocessing::fit(PreprocessKind::center, x);
  CHECK(center.apply(x).data().rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);

  const auto z = Preprocessing::fit(PreprocessKind::zscore, x);
  const Matrix zx = z.apply(x).data();
  CHECK(zx.row(0).squaredNorm() / 4.0 == doctest::Approx(1.0));
  CHECK(zx.row(1).cwiseAbs().maxCoeff() == 0.0);  // constant feature only shifted

  const auto none = Preprocessing::fit(PreprocessKind::none, x);
  CHECK(none.apply(x).data() == m);
  CHECK_THROWS_AS(center.apply(FeatureMatrix(Matrix::Ones(3, 1))), InvalidInput);
}
