#pragma once

#include <cstdint>
#include <optional>

#include "bq/fit_options.hpp"
#include "bq/model.hpp"
#include "bq/optim.hpp"

namespace bq {

struct FitResult {
  QuantizerModel model;
  std::optional<CgTrace> trace;  // atq only
  double initial_objective = 0.0;
  double final_objective = 0.0;
};

/// Dispatches to the method's fit routine.
FitResult fit_quantizer(Method method, const FeatureMatrix& x, int r, std::uint64_t seed,
                        const FitOptions& options = {});

}  // namespace bq
