#include <doctest.h>

#include <cmath>
#include <vector>

#include "bq/errors.hpp"
#include "bq/optim.hpp"
#include "test_util.hpp"

using namespace bq;

namespace {

Matrix scalar(double v) {
  Matrix m(1, 1);
  m << v;
  return m;
}

}  // namespace

TEST_CASE("fletcher_reeves ratio") {
  const Matrix g = scalar(3.0);
  CHECK(*fletcher_reeves(g, g) == 1.0);
  CHECK(*fletcher_reeves(Matrix::Zero(1, 1), g) == 0.0);

  Matrix two(1, 2);
  two << 2.0, 0.0;  // ||.|| = 2
  Matrix one(1, 2);
  one << 0.0, 1.0;  // ||.|| = 1
  CHECK(*fletcher_reeves(two, one) == 4.0);
  CHECK_FALSE(fletcher_reeves(two, Matrix::Zero(1, 2)).has_value());
}

TEST_CASE("cg_direction") {
  CHECK(cg_direction(scalar(2.0)) == scalar(-2.0));
  // theta = 1, s = -1 + 1 * (-1)
  CHECK(cg_direction(scalar(1.0), scalar(1.0), scalar(-1.0)) == scalar(-2.0));
  // -g + theta s_prev = -1 + 1 * 5 = 4 is an ascent direction: restart
  CHECK(cg_direction(scalar(1.0), scalar(1.0), scalar(5.0)) == scalar(-1.0));
  CHECK_THROWS_AS(cg_direction(scalar(1.0), Matrix::Zero(2, 1), scalar(1.0)), InvalidInput);
}

TEST_CASE("cg_direction with identical gradients is exact") {
  RandomSource rng(4);
  const Matrix g = gaussian_matrix(rng, 5, 3);
  Matrix s_prev = -g - 0.25 * gaussian_matrix(rng, 5, 3);
  if (frobenius_dot(g, -g + s_prev) >= 0.0) s_prev = -g;
  const Matrix s = cg_direction(g, g, s_prev);
  CHECK(s == Matrix(-g + s_prev));
}

TEST_CASE("armijo_backtrack on the quadratic w^2") {
  const Objective f = [](const Matrix& w) { return w(0, 0) * w(0, 0); };
  CgParams p;
  // alpha = 1: w = -1, J - J0 = 0 > 0.01 * 2 * (-2) -> reject
  // alpha = 0.5: w = 0, J - J0 = -1 <= 0.01 * 2 * (-1) -> accept
  const auto res = armijo_backtrack(f, scalar(1.0), 1.0, scalar(2.0), scalar(-2.0), p);
  REQUIRE(res.has_value());
  CHECK(res->alpha == 0.5);
  CHECK(res->w_next(0, 0) == 0.0);
  CHECK(res->objective_next == 0.0);
  CHECK(res->backtracks == 1);
}

TEST_CASE("armijo_backtrack accepts alpha0 on a linear objective") {
  const Objective f = [](const Matrix& w) { return 3.0 * w(0, 0); };
  const auto res = armijo_backtrack(f, scalar(0.0), 0.0, scalar(3.0), scalar(-3.0), CgParams{});
  REQUIRE(res.has_value());
  CHECK(res->alpha == 1.0);
}

TEST_CASE("armijo_backtrack rejects ascent and reports failure") {
  const Objective f = [](const Matrix& w) { return w(0, 0) * w(0, 0); };
  CHECK_THROWS_AS(armijo_backtrack(f, scalar(1.0), 1.0, scalar(2.0), scalar(2.0), CgParams{}),
                  InvalidInput);
  // gradient claims descent but the objective only rises
  const Objective rising = [](const Matrix& w) { return 1.0 + std::abs(w(0, 0)); };
  CgParams p;
  p.max_backtracks = 5;
  CHECK_FALSE(armijo_backtrack(rising, scalar(0.0), 1.0, scalar(1.0), scalar(-1.0), p).has_value());
}

TEST_CASE("numerical_stop") {
  const std::vector<double> a{9.0, 0.005};
  CHECK(numerical_stop(a, 0.01));
  const std::vector<double> b{9.0};
  CHECK_FALSE(numerical_stop(b, 0.01));
  const std::vector<double> c{1.0, 1.0};
  CHECK_FALSE(numerical_stop(c, 0.01));
  // the max is over earlier entries only
  const std::vector<double> d{0.001, 5.0, 0.04};
  CHECK(numerical_stop(d, 0.01));
}

TEST_CASE("CgParams validation") {
  CgParams p;
  CHECK_NOTHROW(p.validate());
  p.lambda = 1.0;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = {};
  p.beta = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = {};
  p.alpha0 = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
}

TEST_CASE("cg_minimize converges on the convex quadratic") {
  RandomSource rng(8);
  const Matrix w0 = gaussian_matrix(rng, 3, 2);
  const Objective f = [](const Matrix& w) { return w.squaredNorm(); };
  const Gradient g = [](const Matrix& w) { return Matrix(2.0 * w); };
  CgParams p;
  p.epsilon = 1e-12;  // keep going until the minimizer is reached
  const CgResult res = cg_minimize(f, g, w0, p);
  CHECK(res.minimizer.norm() <= 1e-6);
  CHECK(res.trace.iterations <= 200);
}

TEST_CASE("cg_minimize with default constants on the quadratic") {
  RandomSource rng(9);
  const Matrix w0 = gaussian_matrix(rng, 3, 2);
  const CgResult res = cg_minimize([](const Matrix& w) { return w.squaredNorm(); },
                                   [](const Matrix& w) { return Matrix(2.0 * w); }, w0, CgParams{});
  // alpha = 1/2 lands exactly on the minimizer
  CHECK(res.minimizer.norm() <= 1e-6);
  CHECK(res.trace.stop == StopReason::numerical_stop);
}

TEST_CASE("cg_minimize returns a stationary start immediately") {
  const Matrix w0 = Matrix::Zero(2, 2);
  const CgResult res = cg_minimize([](const Matrix& w) { return w.squaredNorm(); },
                                   [](const Matrix& w) { return Matrix(2.0 * w); }, w0, CgParams{});
  CHECK(res.trace.iterations == 0);
  CHECK(res.minimizer == w0);
  CHECK(res.trace.objective.size() == 1);
}

TEST_CASE("cg_minimize trace invariants on a nonconvex objective") {
  // Rosenbrock-like in matrix form
  const Objective f = [](const Matrix& w) {
    double s = 0.0;
    for (Index i = 0; i + 1 < w.size(); ++i) {
      const double a = w(i + 1) - w(i) * w(i);
      const double b = 1.0 - w(i);
      s += 100.0 * a * a + b * b;
    }
    return s;
  };
  const Gradient g = [](const Matrix& w) {
    Matrix out = Matrix::Zero(w.rows(), w.cols());
    for (Index i = 0; i + 1 < w.size(); ++i) {
      const double a = w(i + 1) - w(i) * w(i);
      out(i) += -400.0 * a * w(i) - 2.0 * (1.0 - w(i));
      out(i + 1) += 200.0 * a;
    }
    return out;
  };
  RandomSource rng(10);
  const Matrix w0 = 0.5 * gaussian_matrix(rng, 2, 2);
  CgParams p;
  p.epsilon = 1e-6;
  int seen = 0;
  const CgResult res = cg_minimize(f, g, w0, p, [&](const CgStep& s) {
    ++seen;
    CHECK(s.objective_next - s.objective_prev <= p.lambda * frobenius_dot(s.gradient, s.w_next - s.w_prev));
    CHECK(s.objective_next < s.objective_prev);
  });
  CHECK(seen == res.trace.iterations);
  for (std::size_t i = 1; i < res.trace.objective.size(); ++i) {
    CHECK(res.trace.objective[i] <= res.trace.objective[i - 1]);
  }
  CHECK(f(res.minimizer) == res.trace.objective.back());

  const CgResult again = cg_minimize(f, g, w0, p);
  CHECK(again.minimizer == res.minimizer);
  CHECK(again.trace.objective == res.trace.objective);
}

TEST_CASE("cg_minimize surfaces non-finite values") {
  const Objective f = [](const Matrix&) { return std::nan(""); };
  const Gradient g = [](const Matrix& w) { return w; };
  CHECK_THROWS_AS(cg_minimize(f, g, Matrix::Ones(1, 1), CgParams{}), NumericalFailure);

  const Objective ok = [](const Matrix& w) { return w.squaredNorm(); };
  const Gradient bad = [](const Matrix& w) {
    Matrix out = w;
    out(0, 0) = std::numeric_limits<double>::infinity();
    return out;
  };
  try {
    cg_minimize(ok, bad, Matrix::Ones(1, 1), CgParams{});
    FAIL("expected NumericalFailure");
  } catch (const NumericalFailure& e) {
    CHECK(e.trace().objective.size() == 1);
  }
}

TEST_CASE("cg_minimize stops on line-search failure with the current iterate") {
  // gradient points the wrong way for this objective
  const Objective f = [](const Matrix& w) { return w(0, 0); };
  const Gradient g = [](const Matrix&) { return scalar(-1.0); };
  CgParams p;
  p.max_backtracks = 3;
  const CgResult res = cg_minimize(f, g, scalar(0.0), p);
  CHECK(res.trace.stop == StopReason::line_search_failure);
  CHECK(res.trace.iterations == 0);
  CHECK(res.minimizer == scalar(0.0));
}
