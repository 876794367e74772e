#include "bq/fit_options.hpp"

#include "bq/errors.hpp"

namespace bq {

namespace {
constexpr std::uint64_t kBandwidthStream = 0x62616E64;  // "band"
}

double resolve_bandwidth(const FitOptions& options, const FeatureMatrix& x, std::uint64_t seed) {
  if (options.bandwidth) {
    if (!(*options.bandwidth >= 0.0)) throw InvalidInput("bandwidth must be non-negative");
    return *options.bandwidth;
  }
  const double median = median_pairwise_distance(x, derive_seed(seed, {kBandwidthStream}));
  // all samples identical: any scale gives constant codes
  return median > 0.0 ? 1.0 / median : 1.0;
}

}  // namespace bq
