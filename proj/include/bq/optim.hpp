#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "bq/core.hpp"

namespace bq {

/// Constants of the CG minimizer. Defaults: lambda = epsilon = 0.01,
/// alpha0 = 1, beta = 0.5.
struct CgParams {
  double lambda = 0.01;   // Armijo sufficient-decrease constant, (0, 1)
  double epsilon = 0.01;  // numerical stopping constant, (0, 1)
  double alpha0 = 1.0;    // first trial step
  double beta = 0.5;      // backtracking factor, (0, 1)
  int max_iters = 200;
  int max_backtracks = 50;

  /// Throws InvalidInput if any constant is out of range.
  void validate() const;
};

enum class StopReason { numerical_stop, max_iters, line_search_failure };

std::string_view to_string(StopReason r);

struct CgTrace {
  std::vector<double> objective;  // J(W0), then J after every accepted iteration
  std::vector<double> decrease;   // J(W^t) - J(W^{t+1}) per accepted iteration
  std::vector<double> step;       // accepted alpha per iteration
  int iterations = 0;
  int restarts = 0;               // directions reset to steepest descent
  StopReason stop = StopReason::max_iters;
};

/// Snapshot handed to the optional observer after each accepted iteration.
struct CgStep {
  const Matrix& w_prev;
  const Matrix& w_next;
  const Matrix& gradient;   // g_t at w_prev
  const Matrix& direction;  // s_t
  double alpha;
  double objective_prev;
  double objective_next;
};

using Objective = std::function<double(const Matrix&)>;
using Gradient = std::function<Matrix(const Matrix&)>;
using CgObserver = std::function<void(const CgStep&)>;

/// Non-finite objective or gradient. Carries the trace up to the failure.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, CgTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const CgTrace& trace() const { return trace_; }

 private:
  CgTrace trace_;
};

/// Frobenius inner product sum(A .* B).
double frobenius_dot(const Matrix& a, const Matrix& b);

/// ||g||^2 / ||g_prev||^2, or nullopt when g_prev is zero (converged).
std::optional<double> fletcher_reeves(const Matrix& g, const Matrix& g_prev);

/// Steepest descent start: -g.
Matrix cg_direction(const Matrix& g);

/// s = -g + theta * s_prev with the Fletcher-Reeves theta. Falls back to -g
/// when g_prev is zero or when s would not be a descent direction (<g, s> >= 0).
Matrix cg_direction(const Matrix& g, const Matrix& g_prev, const Matrix& s_prev);

struct LineSearchResult {
  double alpha;
  Matrix w_next;
  double objective_next;
  int backtracks;
};

/// Backtracking over alpha0 * beta^m, m = 0..max_backtracks, accepting the first step with
///   J(W + alpha s) - J(W) <= lambda * <g, (W + alpha s) - W>.
/// Returns nullopt if no trial step is accepted. Throws InvalidInput if <g, s> >= 0.
std::optional<LineSearchResult> armijo_backtrack(const Objective& f, const Matrix& w,
                                                 double f_w, const Matrix& g, const Matrix& s,
                                                 const CgParams& params);

/// True iff the latest decrease is <= epsilon times the largest earlier one.
/// Needs at least two entries.
bool numerical_stop(std::span<const double> decreases, double epsilon);

struct CgResult {
  Matrix minimizer;
  CgTrace trace;
};

/// Nonlinear conjugate gradient (Fletcher-Reeves directions, Armijo backtracking,
/// objective-decrease stopping rule). Returns the best iterate visited.
CgResult cg_minimize(const Objective& f, const Gradient& grad, const Matrix& w0,
                     const CgParams& params, const CgObserver& observer = {});

}  // namespace bq
