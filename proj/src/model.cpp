#include "bq/model.hpp"

#include <cmath>

#include "bq/errors.hpp"

namespace bq {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::lsh: return "lsh";
    case Method::cq: return "cq";
    case Method::sh: return "sh";
    case Method::itq: return "itq";
    case Method::atq: return "atq";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::lsh, Method::cq, Method::sh, Method::itq, Method::atq}) {
    if (to_string(m) == name) return m;
  }
  throw InvalidInput("unknown method '" + std::string(name) + "' (expected lsh, cq, sh, itq or atq)");
}

std::string_view to_string(PreprocessKind k) {
  switch (k) {
    case PreprocessKind::none: return "none";
    case PreprocessKind::center: return "center";
    case PreprocessKind::zscore: return "zscore";
  }
  return "unknown";
}

PreprocessKind parse_preprocess(std::string_view name) {
  for (auto k : {PreprocessKind::none, PreprocessKind::center, PreprocessKind::zscore}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidInput("unknown preprocessing '" + std::string(name) + "' (expected none, center or zscore)");
}

Preprocessing Preprocessing::fit(PreprocessKind kind, const FeatureMatrix& x) {
  Preprocessing p;
  p.kind = kind;
  const Index d = x.dims();
  p.mean = Vector::Zero(d);
  p.scale = Vector::Ones(d);
  if (kind == PreprocessKind::none) return p;
  if (x.samples() < 1) throw InvalidInput("preprocessing needs at least one sample");
  p.mean = x.data().rowwise().mean();
  if (kind == PreprocessKind::zscore) {
    const Matrix centered = x.data().colwise() - p.mean;
    for (Index i = 0; i < d; ++i) {
      const double sd = std::sqrt(centered.row(i).squaredNorm() / static_cast<double>(x.samples()));
      // constant features are only shifted
      p.scale(i) = sd > 0.0 ? sd : 1.0;
    }
  }
  return p;
}

FeatureMatrix Preprocessing::apply(const FeatureMatrix& x) const {
  if (x.dims() != mean.size()) {
    throw InvalidInput("data has " + std::to_string(x.dims()) + " features, model expects " +
                       std::to_string(mean.size()));
  }
  if (kind == PreprocessKind::none) return x;
  Matrix out = x.data().colwise() - mean;
  if (kind == PreprocessKind::zscore) out = scale.cwiseInverse().asDiagonal() * out;
  return FeatureMatrix(std::move(out));
}

bool QuantizerModel::cosine_rule() const {
  return method == Method::cq || method == Method::sh || method == Method::atq;
}

BinaryCodeSet QuantizerModel::encode(const FeatureMatrix& x) const {
  if (x.dims() != dims()) {
    throw InvalidInput("data has " + std::to_string(x.dims()) + " features, model expects " +
                       std::to_string(dims()));
  }
  const FeatureMatrix xp = preprocess.apply(x);
  if (xp.samples() == 0) return BinaryCodeSet(bits(), 0);
  if (cosine_rule()) return sign_quantize(cos_map(w, b, xp));
  Matrix proj = w.transpose() * xp.data();
  proj.colwise() += b;
  return sign_quantize(proj);
}

}  // namespace bq
