#include "bq/quantizer.hpp"

#include "bq/atq.hpp"
#include "bq/baselines.hpp"

namespace bq {

FitResult fit_quantizer(Method method, const FeatureMatrix& x, int r, std::uint64_t seed,
                        const FitOptions& options) {
  switch (method) {
    case Method::lsh: return {lsh_fit(x, r, seed, options), std::nullopt};
    case Method::cq: return {cq_fit(x, r, seed, options), std::nullopt};
    case Method::sh: return {sh_fit(x, r, seed, options), std::nullopt};
    case Method::itq: return {itq_fit(x, r, seed, options), std::nullopt};
    case Method::atq: {
      AtqFit fit = fit_atq(x, r, seed, options);
      return {std::move(fit.model), std::move(fit.trace), fit.initial_objective, fit.final_objective};
    }
  }
  return {};
}

}  // namespace bq
