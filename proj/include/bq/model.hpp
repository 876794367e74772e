#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bq/codes.hpp"
#include "bq/core.hpp"

namespace bq {

enum class Method : std::uint32_t { lsh = 1, cq = 2, sh = 3, itq = 4, atq = 5 };

std::string_view to_string(Method m);
/// Parses "lsh", "cq", "sh", "itq" or "atq"; throws InvalidInput otherwise.
Method parse_method(std::string_view name);

enum class PreprocessKind : std::uint32_t { none = 0, center = 1, zscore = 2 };

std::string_view to_string(PreprocessKind k);
PreprocessKind parse_preprocess(std::string_view name);

/// Per-feature affine normalization fitted on training data, re-applied at encode time:
/// x' = (x - mean) / scale. `none` stores mean 0 and scale 1.
struct Preprocessing {
  PreprocessKind kind = PreprocessKind::none;
  Vector mean;
  Vector scale;

  static Preprocessing fit(PreprocessKind kind, const FeatureMatrix& x);
  FeatureMatrix apply(const FeatureMatrix& x) const;
};

/// One selected spectral-hashing mode: the k-th sinusoid along principal direction `dim`.
struct ShMode {
  std::uint32_t dim = 0;
  std::uint32_t order = 0;
  double eigenvalue = 0.0;
};

/// PCA frame and mode table behind an SH model; W and b already fold these in.
struct ShExtras {
  Matrix basis;  // d x npca
  Vector mean;   // d
  Vector lo;     // npca
  Vector hi;     // npca
  std::vector<ShMode> modes;
};

/// A fitted quantizer of any method.
///
/// Every method reduces to a projection W (d x r) and offset b (length r)
/// applied to preprocessed data. LSH and ITQ emit sgn(W^T x + b); CQ, SH and
/// ATQ emit sgn(cos(W^T x + b)).
struct QuantizerModel {
  Method method = Method::atq;
  Matrix w;
  Vector b;
  std::uint64_t seed = 0;
  Preprocessing preprocess;
  double bandwidth = 1.0;          // cq, atq: scale of the Gaussian draw for W
  std::optional<Matrix> rotation;  // itq
  std::optional<Matrix> pca_basis; // itq
  std::optional<ShExtras> sh;

  Index dims() const { return w.rows(); }
  int bits() const { return static_cast<int>(w.cols()); }
  bool cosine_rule() const;

  /// Preprocesses x then applies the method's encode rule.
  BinaryCodeSet encode(const FeatureMatrix& x) const;
};

}  // namespace bq
