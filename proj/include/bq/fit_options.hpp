#pragma once

#include <optional>

#include "bq/model.hpp"
#include "bq/optim.hpp"

namespace bq {

/// Knobs shared by every fit routine. Each method reads the fields it needs.
struct FitOptions {
  PreprocessKind preprocess = PreprocessKind::center;
  CgParams cg;                       // atq
  std::optional<double> bandwidth;   // cq, atq; unset = 1 / median pairwise distance
  int restarts = 1;                  // atq stage-1 random restarts
  int itq_iters = 50;                // itq
};

/// Resolves the Gaussian scale used by cq and atq: the explicit bandwidth, or
/// 1 / median pairwise distance of a seeded 1000-sample subsample.
double resolve_bandwidth(const FitOptions& options, const FeatureMatrix& x, std::uint64_t seed);

}  // namespace bq
