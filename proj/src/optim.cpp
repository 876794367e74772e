#include "bq/optim.hpp"

#include <algorithm>
#include <cmath>

#include "bq/errors.hpp"

namespace bq {

void CgParams::validate() const {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidInput("lambda must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidInput("beta must lie in (0, 1)");
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) throw InvalidInput("alpha0 must be positive");
  if (max_iters < 1) throw InvalidInput("max_iters must be positive");
  if (max_backtracks < 1) throw InvalidInput("max_backtracks must be positive");
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::numerical_stop: return "numerical-stop";
    case StopReason::max_iters: return "max-iters";
    case StopReason::line_search_failure: return "line-search-failure";
  }
  return "unknown";
}

double frobenius_dot(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInput("frobenius_dot: shape mismatch");
  }
  return a.cwiseProduct(b).sum();
}

std::optional<double> fletcher_reeves(const Matrix& g, const Matrix& g_prev) {
  const double denom = g_prev.squaredNorm();
  if (denom == 0.0) return std::nullopt;
  return g.squaredNorm() / denom;
}

Matrix cg_direction(const Matrix& g) { return -g; }

Matrix cg_direction(const Matrix& g, const Matrix& g_prev, const Matrix& s_prev) {
  if (g.rows() != g_prev.rows() || g.cols() != g_prev.cols() || g.rows() != s_prev.rows() ||
      g.cols() != s_prev.cols()) {
    throw InvalidInput("cg_direction: gradient and direction shapes differ");
  }
  const auto theta = fletcher_reeves(g, g_prev);
  if (!theta) return -g;
  Matrix s = -g + *theta * s_prev;
  if (frobenius_dot(g, s) >= 0.0) return -g;
  return s;
}

std::optional<LineSearchResult> armijo_backtrack(const Objective& f, const Matrix& w,
                                                 double f_w, const Matrix& g, const Matrix& s,
                                                 const CgParams& params) {
  if (frobenius_dot(g, s) >= 0.0) {
    throw InvalidInput("armijo_backtrack: direction is not a descent direction");
  }
  double alpha = params.alpha0;
  for (int m = 0; m <= params.max_backtracks; ++m, alpha *= params.beta) {
    Matrix w_next = w + alpha * s;
    const double f_next = f(w_next);
    const double rhs = params.lambda * frobenius_dot(g, w_next - w);
    // NaN trial values fail the comparison and are backtracked
    if (f_next - f_w <= rhs) return LineSearchResult{alpha, std::move(w_next), f_next, m};
  }
  return std::nullopt;
}

bool numerical_stop(std::span<const double> decreases, double epsilon) {
  if (decreases.size() < 2) return false;
  const double largest = *std::max_element(decreases.begin(), decreases.end() - 1);
  return decreases.back() <= epsilon * largest;
}

CgResult cg_minimize(const Objective& f, const Gradient& grad, const Matrix& w0,
                     const CgParams& params, const CgObserver& observer) {
  params.validate();
  if (!w0.allFinite()) throw InvalidInput("cg_minimize: initial iterate is not finite");

  CgTrace trace;
  Matrix w = w0;
  double fw = f(w);
  if (!std::isfinite(fw)) throw NumericalFailure("objective is not finite at the start", trace);
  trace.objective.push_back(fw);
  Matrix g = grad(w);
  if (!g.allFinite()) throw NumericalFailure("gradient is not finite at the start", trace);

  if (g.squaredNorm() == 0.0) {
    trace.stop = StopReason::numerical_stop;
    return {w, trace};
  }

  Matrix best = w;
  double best_f = fw;
  Matrix g_prev;
  Matrix s_prev;
  trace.stop = StopReason::max_iters;

  for (int t = 0; t < params.max_iters; ++t) {
    Matrix s;
    if (t == 0) {
      s = cg_direction(g);
    } else {
      s = cg_direction(g, g_prev, s_prev);
      if ((s + g).squaredNorm() == 0.0) ++trace.restarts;
    }

    auto step = armijo_backtrack(f, w, fw, g, s, params);
    if (!step) {
      trace.stop = StopReason::line_search_failure;
      break;
    }
    if (observer) observer(CgStep{w, step->w_next, g, s, step->alpha, fw, step->objective_next});

    trace.decrease.push_back(fw - step->objective_next);
    trace.step.push_back(step->alpha);
    trace.objective.push_back(step->objective_next);
    ++trace.iterations;

    w = std::move(step->w_next);
    fw = step->objective_next;
    if (fw < best_f) {
      best = w;
      best_f = fw;
    }

    g_prev = std::move(g);
    s_prev = std::move(s);
    g = grad(w);
    if (!g.allFinite()) throw NumericalFailure("gradient is not finite", trace);
    if (g.squaredNorm() == 0.0 || numerical_stop(trace.decrease, params.epsilon)) {
      trace.stop = StopReason::numerical_stop;
      break;
    }
  }
  return {best, trace};
}

}  // namespace bq
