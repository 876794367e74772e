#include "bq/atq.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bq/errors.hpp"

namespace bq {

namespace {

constexpr std::uint64_t kRestartStream = 0x72737472;  // "rstr"
constexpr std::uint64_t kRedrawStream = 0x72647277;   // "rdrw"

void check_inputs(const Matrix& w, const FeatureMatrix& x) {
  if (w.rows() != x.dims()) {
    throw InvalidInput("projection has " + std::to_string(w.rows()) + " rows, data has " +
                       std::to_string(x.dims()) + " features");
  }
  if (w.cols() < 1) throw InvalidInput("projection needs at least one column");
  if (x.samples() < 2) {
    throw InvalidInput("the mapping objective needs n >= 2 samples, got n = " +
                       std::to_string(x.samples()));
  }
}

}  // namespace

double atq_objective(const Matrix& w, const FeatureMatrix& x) {
  check_inputs(w, x);
  const Matrix cosines = (w.transpose() * x.data()).array().cos().matrix();
  // c^T P c = ||P c||^2 for the symmetric idempotent centering matrix P
  return center_rows(cosines).squaredNorm();
}

Matrix atq_gradient(const Matrix& w, const FeatureMatrix& x) {
  check_inputs(w, x);
  const Matrix proj = w.transpose() * x.data();
  const Matrix centered = center_rows(proj.array().cos().matrix());
  const Matrix weights = proj.array().sin() * centered.array();
  return -2.0 * x.data() * weights.transpose();
}

MappingFit fit_mapping(const FeatureMatrix& x, int r, std::uint64_t seed, const CgParams& params,
                       double init_scale) {
  if (r < 1) throw InvalidInput("code length must be at least 1 bit");
  if (x.samples() < 2) {
    throw InvalidInput("ATQ needs n >= 2 samples, got n = " + std::to_string(x.samples()));
  }
  RandomSource rng(seed);
  const Matrix w0 = init_scale * gaussian_matrix(rng, x.dims(), r);
  auto result = cg_minimize([&](const Matrix& w) { return atq_objective(w, x); },
                            [&](const Matrix& w) { return atq_gradient(w, x); }, w0, params);
  return {std::move(result.minimizer), w0, std::move(result.trace)};
}

double offset_objective(const Vector& w, const FeatureMatrix& x, double b) {
  if (w.size() != x.dims()) throw InvalidInput("offset: projection length differs from feature count");
  return ((x.data().transpose() * w).array() + b).cos().square().sum();
}

OffsetSolution fit_offset(const Vector& w, const FeatureMatrix& x) {
  if (w.size() != x.dims()) {
    throw InvalidInput("offset: projection has " + std::to_string(w.size()) +
                       " entries, data has " + std::to_string(x.dims()) + " features");
  }
  const Eigen::ArrayXd doubled = 2.0 * (x.data().transpose() * w).array();
  OffsetSolution sol;
  sol.c = doubled.cos().sum();
  sol.s = doubled.sin().sum();
  if (sol.c == 0.0 && sol.s == 0.0) {
    sol.degenerate = true;
    sol.b = 0.0;
  } else {
    sol.b = -0.5 * std::atan2(sol.s, sol.c);
    if (sol.b <= -std::numbers::pi / 2) sol.b += std::numbers::pi;
  }
  sol.objective = offset_objective(w, x, sol.b);
  return sol;
}

AtqFit fit_atq(const FeatureMatrix& x, int r, std::uint64_t seed, const FitOptions& options) {
  if (x.samples() < 2) {
    throw FitError("ATQ needs n >= 2 samples, got n = " + std::to_string(x.samples()));
  }
  if (r < 1) throw InvalidInput("code length must be at least 1 bit");
  if (options.restarts < 1) throw InvalidInput("restarts must be at least 1");

  AtqFit fit;
  QuantizerModel& model = fit.model;
  model.method = Method::atq;
  model.seed = seed;
  model.preprocess = Preprocessing::fit(options.preprocess, x);
  const FeatureMatrix xp = model.preprocess.apply(x);
  model.bandwidth = resolve_bandwidth(options, xp, seed);

  bool have = false;
  for (int k = 0; k < options.restarts; ++k) {
    const std::uint64_t stream = k == 0 ? seed : derive_seed(seed, {kRestartStream, std::uint64_t(k)});
    MappingFit m = fit_mapping(xp, r, stream, options.cg, model.bandwidth);
    const double j_final = m.trace.objective.back();
    if (!have || j_final < fit.final_objective) {
      have = true;
      model.w = std::move(m.w);
      fit.trace = std::move(m.trace);
      fit.initial_objective = fit.trace.objective.front();
      fit.final_objective = j_final;
    }
  }

  RandomSource redraw(derive_seed(seed, {kRedrawStream}));
  for (Index j = 0; j < model.w.cols(); ++j) {
    while (model.w.col(j).squaredNorm() == 0.0) {
      model.w.col(j) = model.bandwidth * gaussian_matrix(redraw, model.w.rows(), 1);
      if (model.bandwidth == 0.0) break;
    }
  }

  model.b.resize(r);
  for (Index j = 0; j < r; ++j) model.b(j) = fit_offset(model.w.col(j), xp).b;
  return fit;
}

}  // namespace bq
