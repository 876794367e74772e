#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bq/codes.hpp"
#include "bq/core.hpp"
#include "bq/eval.hpp"
#include "bq/model.hpp"

namespace bq {

namespace fs = std::filesystem;

/// IDX image file (magic 2051, big-endian dims) -> one column per image,
/// rows*cols features scaled by 1/255.
FeatureMatrix load_idx_images(const fs::path& path);

/// IDX label file (magic 2049) -> label per item.
std::vector<int> load_idx_labels(const fs::path& path);

enum class FeatureDtype : std::uint32_t { f32 = 4, f64 = 8 };

/// Feature file layout, all little-endian:
///   "BQF1" | d: u32 | n: u64 | dtype: u32 (4 = f32, 8 = f64) | d*n values, column-major.
void save_features(const fs::path& path, const FeatureMatrix& x, FeatureDtype dtype = FeatureDtype::f64);

/// Reads a BQF1 file, or CSV (one sample per line, comma separated) when the
/// magic is absent.
FeatureMatrix load_features(const fs::path& path);

FeatureMatrix parse_features_csv(const std::string& text);

/// Features from any supported file: IDX images, BQF1 or CSV.
FeatureMatrix load_dataset(const fs::path& path);

/// Code file layout: "BQC1" | r: u32 | n: u64 | n * ceil(r/64) u64 words.
void save_codes(const fs::path& path, const BinaryCodeSet& codes);
BinaryCodeSet load_codes(const fs::path& path);

/// Model file layout (little-endian, f64 matrices column-major):
///   "BQM1" | method: u32 | d: u32 | r: u32 | seed: u64 | preprocess: u32
///   | mean: d f64 | scale: d f64 | W: d*r f64 | b: r f64 | bandwidth: f64
///   | itq: npca: u32 (= r), basis d*r f64, rotation r*r f64
///   | sh:  npca: u32, basis d*npca f64, mean d f64, lo npca f64, hi npca f64,
///          r modes of (dim: u32, order: u32, eigenvalue: f64)
void save_model(const fs::path& path, const QuantizerModel& model);
QuantizerModel load_model(const fs::path& path);

std::vector<std::uint8_t> serialize_model(const QuantizerModel& model);
QuantizerModel deserialize_model(std::span<const std::uint8_t> bytes);

/// CSV with header method,bits,neighbors,seed,map,fit_ms,encode_ms,query_ms,
/// rows sorted by (method, bits, neighbors), map with 6 decimals, timings with
/// 3 decimals or empty when not recorded, map "nan" for failed cells.
std::string results_csv(std::span<const EvalReport> reports);
void write_results_csv(std::span<const EvalReport> reports, const fs::path& path);

}  // namespace bq
