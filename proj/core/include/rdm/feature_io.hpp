#pragma once

// Labeled feature sets on disk.
//
// LFS (little-endian):
//   "LFSV" 0x01 | u32 N | u32 d | u32 C | u16 meta_len | meta (UTF-8)
//   then N records of u32 label followed by d f32 values.
// A meta_len of 0 means no metadata.
//
// CSV: header "label,f0,...,f{d-1}", one sample per row; C = max label + 1.

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdm {

struct LabeledFeatureSet {
  std::size_t count = 0;
  std::size_t dimension = 0;
  std::size_t class_count = 0;
  /// Row-major count x dimension.
  std::vector<double> features;
  std::vector<std::uint32_t> labels;
  std::string metadata;

  std::span<const double> sample(std::size_t i) const {
    return std::span<const double>(features).subspan(i * dimension, dimension);
  }

  /// Throws std::invalid_argument on shape errors, out-of-range labels,
  /// non-finite values or classes with fewer than 2 members.
  void validate() const;
};

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Features are narrowed to f32 on write.
std::string encode_lfs(const LabeledFeatureSet& set);
LabeledFeatureSet decode_lfs(const std::string& bytes);

LabeledFeatureSet parse_feature_csv(const std::string& text);

/// Dispatches on the magic bytes: LFS when present, CSV otherwise.
LabeledFeatureSet load_feature_set(const std::filesystem::path& path);
void save_lfs(const std::filesystem::path& path, const LabeledFeatureSet& set);

}  // namespace rdm
