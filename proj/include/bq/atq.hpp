#pragma once

#include <cstdint>

#include "bq/core.hpp"
#include "bq/fit_options.hpp"
#include "bq/model.hpp"
#include "bq/optim.hpp"

namespace bq {

/// Stage-1 objective summed over bits: sum_j c_j^T (I - ee^T/n) c_j with
/// c_j = cos(X^T w_j). Equals n times the summed per-bit variance of the
/// cosine responses. Requires n >= 2.
double atq_objective(const Matrix& w, const FeatureMatrix& x);

/// Gradient of atq_objective. Column j is -2 X diag(sin(X^T w_j)) (I - ee^T/n) cos(X^T w_j).
Matrix atq_gradient(const Matrix& w, const FeatureMatrix& x);

struct MappingFit {
  Matrix w;
  Matrix w_init;
  CgTrace trace;
};

/// Draws W0 = init_scale * N(0, 1)^{d x r} from `seed` and minimizes atq_objective by CG.
MappingFit fit_mapping(const FeatureMatrix& x, int r, std::uint64_t seed, const CgParams& params,
                       double init_scale = 1.0);

/// Closed-form maximizer of sum_i cos^2(w^T x_i + b) over b.
///
/// With C = sum cos(2 w^T x_i) and S = sum sin(2 w^T x_i) the objective is
/// n/2 + (C cos 2b - S sin 2b) / 2 = n/2 + sqrt(C^2 + S^2)/2 * cos(2b + atan2(S, C)),
/// maximized at b = -atan2(S, C) / 2, reported in (-pi/2, pi/2].
struct OffsetSolution {
  double b = 0.0;
  double c = 0.0;
  double s = 0.0;
  double objective = 0.0;  // sum_i cos^2(w^T x_i + b), summed directly
  bool degenerate = false; // C = S = 0: every b is optimal, b = 0 returned
};

OffsetSolution fit_offset(const Vector& w, const FeatureMatrix& x);

/// sum_i cos^2(w^T x_i + b).
double offset_objective(const Vector& w, const FeatureMatrix& x, double b);

struct AtqFit {
  QuantizerModel model;
  CgTrace trace;
  double initial_objective = 0.0;
  double final_objective = 0.0;
};

/// Two-stage training: CG on the mapping with offsets ignored, then the
/// closed-form offset for each learned column. Preprocessing is fitted and
/// stored in the model.
AtqFit fit_atq(const FeatureMatrix& x, int r, std::uint64_t seed, const FitOptions& options = {});

}  // namespace bq
