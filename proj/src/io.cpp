#include "bq/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <tuple>

#include "bq/errors.hpp"

namespace bq {

namespace {

constexpr char kFeatureMagic[4] = {'B', 'Q', 'F', '1'};
constexpr char kCodeMagic[4] = {'B', 'Q', 'C', '1'};
constexpr char kModelMagic[4] = {'B', 'Q', 'M', '1'};
constexpr std::uint32_t kIdxImages = 2051;
constexpr std::uint32_t kIdxLabels = 2049;

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string() + ": " + std::strerror(errno));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string() + ": " + std::strerror(errno));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to " + path.string() + " failed: " + std::strerror(errno));
}

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::string what)
      : bytes_(bytes), what_(std::move(what)) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* field) const {
    if (remaining() < n) {
      throw FormatError(what_ + ": truncated at byte offset " + std::to_string(pos_) + " reading " +
                        field + " (need " + std::to_string(n) + " bytes, " +
                        std::to_string(remaining()) + " left)");
    }
  }

  bool magic(const char (&m)[4]) const {
    return remaining() >= 4 && std::memcmp(bytes_.data() + pos_, m, 4) == 0;
  }

  void expect_magic(const char (&m)[4]) {
    if (!magic(m)) {
      throw FormatError(what_ + ": bad magic at byte offset " + std::to_string(pos_) +
                        " (expected " + std::string(m, 4) + ")");
    }
    pos_ += 4;
  }

  template <typename T>
  T le(const char* field) {
    need(sizeof(T), field);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(bytes_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return v;
  }

  std::uint32_t be32(const char* field) {
    need(4, field);
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }

  double f64(const char* field) { return std::bit_cast<double>(le<std::uint64_t>(field)); }
  float f32(const char* field) { return std::bit_cast<float>(le<std::uint32_t>(field)); }

  Matrix matrix(Index rows, Index cols, const char* field) {
    need(static_cast<std::size_t>(rows * cols) * 8, field);
    Matrix m(rows, cols);
    for (Index c = 0; c < cols; ++c)
      for (Index r = 0; r < rows; ++r) m(r, c) = f64(field);
    return m;
  }

  Vector vector(Index n, const char* field) { return matrix(n, 1, field); }

  std::uint8_t byte() { need(1, "byte"); return bytes_[pos_++]; }

  void expect_end() const {
    if (remaining() != 0) {
      throw FormatError(what_ + ": " + std::to_string(remaining()) +
                        " unexpected trailing bytes at offset " + std::to_string(pos_));
    }
  }

  const std::string& what() const { return what_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::string what_;
  std::size_t pos_ = 0;
};

class ByteWriter {
 public:
  void raw(const char (&m)[4]) { bytes_.insert(bytes_.end(), m, m + 4); }

  template <typename T>
  void le(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  void f32(float v) { le(std::bit_cast<std::uint32_t>(v)); }

  void matrix(const Matrix& m) {
    for (Index c = 0; c < m.cols(); ++c)
      for (Index r = 0; r < m.rows(); ++r) f64(m(r, c));
  }

  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

// Guards every count product against overflow and against the real payload size.
void check_payload(const ByteReader& in, std::uint64_t a, std::uint64_t b, std::uint64_t elem,
                   const char* field) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
  if (a != 0 && b > limit / a) throw FormatError(in.what() + ": " + field + " count overflows");
  const std::uint64_t count = a * b;
  if (elem != 0 && count > limit / elem) throw FormatError(in.what() + ": " + field + " size overflows");
  const std::uint64_t expected = count * elem;
  if (expected != in.remaining()) {
    throw FormatError(in.what() + ": " + field + " payload at byte offset " +
                      std::to_string(in.offset()) + " should be " + std::to_string(expected) +
                      " bytes, file has " + std::to_string(in.remaining()));
  }
}

}  // namespace

FeatureMatrix load_idx_images(const fs::path& path) {
  const auto bytes = read_file(path);
  ByteReader in(bytes, path.string());
  const std::uint32_t magic = in.be32("magic");
  if (magic != kIdxImages) {
    throw FormatError(path.string() + ": bad IDX image magic " + std::to_string(magic) +
                      " at byte offset 0 (expected 2051)");
  }
  const std::uint32_t n = in.be32("item count");
  const std::uint32_t rows = in.be32("row count");
  const std::uint32_t cols = in.be32("column count");
  if (rows == 0 || cols == 0) throw FormatError(path.string() + ": zero image dimensions");
  const std::uint64_t d = std::uint64_t{rows} * cols;
  check_payload(in, d, n, 1, "pixel");
  Matrix x(static_cast<Index>(d), static_cast<Index>(n));
  for (Index i = 0; i < x.cols(); ++i)
    for (Index j = 0; j < x.rows(); ++j) x(j, i) = in.byte() / 255.0;
  return FeatureMatrix(std::move(x));
}

std::vector<int> load_idx_labels(const fs::path& path) {
  const auto bytes = read_file(path);
  ByteReader in(bytes, path.string());
  const std::uint32_t magic = in.be32("magic");
  if (magic != kIdxLabels) {
    throw FormatError(path.string() + ": bad IDX label magic " + std::to_string(magic) +
                      " at byte offset 0 (expected 2049)");
  }
  const std::uint32_t n = in.be32("item count");
  check_payload(in, n, 1, 1, "label");
  std::vector<int> labels(n);
  for (auto& l : labels) l = in.byte();
  return labels;
}

void save_features(const fs::path& path, const FeatureMatrix& x, FeatureDtype dtype) {
  ByteWriter out;
  out.raw(kFeatureMagic);
  out.le(static_cast<std::uint32_t>(x.dims()));
  out.le(static_cast<std::uint64_t>(x.samples()));
  out.le(static_cast<std::uint32_t>(dtype));
  const Matrix& m = x.data();
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      if (dtype == FeatureDtype::f64) out.f64(m(r, c));
      else out.f32(static_cast<float>(m(r, c)));
    }
  }
  write_file(path, out.bytes());
}

FeatureMatrix parse_features_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      std::string_view field(line.data() + start, (comma == std::string::npos ? line.size() : comma) - start);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw FormatError("CSV line " + std::to_string(lineno) + ": cannot parse '" +
                          std::string(field) + "' as a number");
      }
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError("CSV line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                        " fields, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("CSV contains no samples");
  Matrix x(static_cast<Index>(rows.front().size()), static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      x(static_cast<Index>(j), static_cast<Index>(i)) = rows[i][j];
  return FeatureMatrix(std::move(x));
}

FeatureMatrix load_features(const fs::path& path) {
  const auto bytes = read_file(path);
  ByteReader in(bytes, path.string());
  if (!in.magic(kFeatureMagic)) return parse_features_csv(std::string(bytes.begin(), bytes.end()));
  in.expect_magic(kFeatureMagic);
  const std::uint32_t d = in.le<std::uint32_t>("feature count");
  const std::uint64_t n = in.le<std::uint64_t>("sample count");
  const std::uint32_t dtype = in.le<std::uint32_t>("dtype");
  if (d == 0) throw FormatError(path.string() + ": feature count is zero");
  if (dtype != 4 && dtype != 8) {
    throw FormatError(path.string() + ": unknown dtype tag " + std::to_string(dtype) + " at byte offset 16");
  }
  check_payload(in, d, n, dtype, "feature");
  Matrix x(static_cast<Index>(d), static_cast<Index>(n));
  for (Index c = 0; c < x.cols(); ++c)
    for (Index r = 0; r < x.rows(); ++r)
      x(r, c) = dtype == 8 ? in.f64("value") : static_cast<double>(in.f32("value"));
  return FeatureMatrix(std::move(x));
}

FeatureMatrix load_dataset(const fs::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 4 && bytes[0] == 0 && bytes[1] == 0 && bytes[2] == 0x08 && bytes[3] == 0x03) {
    return load_idx_images(path);
  }
  return load_features(path);
}

void save_codes(const fs::path& path, const BinaryCodeSet& codes) {
  ByteWriter out;
  out.raw(kCodeMagic);
  out.le(static_cast<std::uint32_t>(codes.bits()));
  out.le(static_cast<std::uint64_t>(codes.size()));
  for (std::uint64_t w : codes.words()) out.le(w);
  write_file(path, out.bytes());
}

BinaryCodeSet load_codes(const fs::path& path) {
  const auto bytes = read_file(path);
  ByteReader in(bytes, path.string());
  in.expect_magic(kCodeMagic);
  const std::uint32_t r = in.le<std::uint32_t>("bit count");
  const std::uint64_t n = in.le<std::uint64_t>("code count");
  if (r == 0) throw FormatError(path.string() + ": bit count is zero");
  const auto wpc = static_cast<std::uint64_t>(words_for_bits(static_cast<int>(r)));
  check_payload(in, n, wpc, 8, "code");
  std::vector<std::uint64_t> words(n * wpc);
  for (auto& w : words) w = in.le<std::uint64_t>("code word");
  try {
    return BinaryCodeSet(static_cast<int>(r), static_cast<std::int64_t>(n), std::move(words));
  } catch (const InvalidInput& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> serialize_model(const QuantizerModel& m) {
  const Index d = m.dims();
  const Index r = m.bits();
  ByteWriter out;
  out.raw(kModelMagic);
  out.le(static_cast<std::uint32_t>(m.method));
  out.le(static_cast<std::uint32_t>(d));
  out.le(static_cast<std::uint32_t>(r));
  out.le(m.seed);
  out.le(static_cast<std::uint32_t>(m.preprocess.kind));
  out.matrix(m.preprocess.mean);
  out.matrix(m.preprocess.scale);
  out.matrix(m.w);
  out.matrix(m.b);
  out.f64(m.bandwidth);
  if (m.method == Method::itq) {
    if (!m.rotation || !m.pca_basis) throw InvalidInput("ITQ model lacks its rotation or PCA basis");
    out.le(static_cast<std::uint32_t>(m.pca_basis->cols()));
    out.matrix(*m.pca_basis);
    out.matrix(*m.rotation);
  } else if (m.method == Method::sh) {
    if (!m.sh) throw InvalidInput("SH model lacks its mode table");
    out.le(static_cast<std::uint32_t>(m.sh->basis.cols()));
    out.matrix(m.sh->basis);
    out.matrix(m.sh->mean);
    out.matrix(m.sh->lo);
    out.matrix(m.sh->hi);
    for (const ShMode& mode : m.sh->modes) {
      out.le(mode.dim);
      out.le(mode.order);
      out.f64(mode.eigenvalue);
    }
  }
  return std::move(out.bytes());
}

QuantizerModel deserialize_model(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes, "model");
  in.expect_magic(kModelMagic);
  QuantizerModel m;
  const std::uint32_t method = in.le<std::uint32_t>("method");
  if (method < 1 || method > 5) {
    throw FormatError("model: unknown method tag " + std::to_string(method) + " at byte offset 4");
  }
  m.method = static_cast<Method>(method);
  const std::uint32_t d = in.le<std::uint32_t>("d");
  const std::uint32_t r = in.le<std::uint32_t>("r");
  if (d == 0 || r == 0) throw FormatError("model: zero dimensions");
  m.seed = in.le<std::uint64_t>("seed");
  const std::uint32_t pre = in.le<std::uint32_t>("preprocess");
  if (pre > 2) throw FormatError("model: unknown preprocessing tag " + std::to_string(pre));
  m.preprocess.kind = static_cast<PreprocessKind>(pre);
  // fixed section must fit before anything is allocated
  in.need((std::uint64_t{d} * 2 + std::uint64_t{d} * r + r + 1) * 8, "model body");
  m.preprocess.mean = in.vector(d, "mean");
  m.preprocess.scale = in.vector(d, "scale");
  m.w = in.matrix(d, r, "W");
  m.b = in.vector(r, "b");
  m.bandwidth = in.f64("bandwidth");
  if (m.method == Method::itq) {
    const std::uint32_t npca = in.le<std::uint32_t>("npca");
    if (npca != r) throw FormatError("model: ITQ basis has " + std::to_string(npca) + " columns, expected r");
    in.need((std::uint64_t{d} * r + std::uint64_t{r} * r) * 8, "ITQ extras");
    m.pca_basis = in.matrix(d, r, "PCA basis");
    m.rotation = in.matrix(r, r, "rotation");
  } else if (m.method == Method::sh) {
    const std::uint32_t npca = in.le<std::uint32_t>("npca");
    if (npca == 0 || npca > d) throw FormatError("model: bad SH basis width " + std::to_string(npca));
    in.need((std::uint64_t{d} * npca + d + 2 * std::uint64_t{npca}) * 8 + std::uint64_t{r} * 16, "SH extras");
    ShExtras sh;
    sh.basis = in.matrix(d, npca, "SH basis");
    sh.mean = in.vector(d, "SH mean");
    sh.lo = in.vector(npca, "SH lo");
    sh.hi = in.vector(npca, "SH hi");
    sh.modes.resize(r);
    for (ShMode& mode : sh.modes) {
      mode.dim = in.le<std::uint32_t>("mode dim");
      mode.order = in.le<std::uint32_t>("mode order");
      mode.eigenvalue = in.f64("mode eigenvalue");
      if (mode.dim >= npca) throw FormatError("model: SH mode refers to direction " + std::to_string(mode.dim));
    }
    m.sh = std::move(sh);
  }
  in.expect_end();
  return m;
}

void save_model(const fs::path& path, const QuantizerModel& model) {
  write_file(path, serialize_model(model));
}

QuantizerModel load_model(const fs::path& path) {
  const auto bytes = read_file(path);
  try {
    return deserialize_model(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string results_csv(std::span<const EvalReport> reports) {
  std::vector<const EvalReport*> rows;
  for (const auto& r : reports) rows.push_back(&r);
  std::stable_sort(rows.begin(), rows.end(), [](const EvalReport* a, const EvalReport* b) {
    return std::tie(a->method, a->bits, a->neighbors) < std::tie(b->method, b->bits, b->neighbors);
  });
  auto fixed = [](double v, int decimals) {
    if (std::isnan(v)) return std::string("nan");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return std::string(buf);
  };
  auto timing = [&](const std::optional<double>& v) { return v ? fixed(*v, 3) : std::string(); };

  std::string out = "method,bits,neighbors,seed,map,fit_ms,encode_ms,query_ms\n";
  for (const EvalReport* r : rows) {
    out += r->method + ',' + std::to_string(r->bits) + ',' + std::to_string(r->neighbors) + ',' +
           std::to_string(r->seed) + ',' + fixed(r->map, 6) + ',' + timing(r->fit_ms) + ',' +
           timing(r->encode_ms) + ',' + timing(r->query_ms) + '\n';
  }
  return out;
}

void write_results_csv(std::span<const EvalReport> reports, const fs::path& path) {
  if (reports.empty()) throw InvalidInput("write_results_csv: no reports");
  const std::string text = results_csv(reports);
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace bq
