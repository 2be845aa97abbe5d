#include "rdm/feature_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>

#include "rdm/output.hpp"

namespace rdm {

namespace {

constexpr char kMagic[4] = {'L', 'F', 'S', 'V'};
constexpr std::uint8_t kVersion = 1;

template <class T>
void put(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint32_t>;
  U bits;
  std::memcpy(&bits, &value, sizeof bits);
  for (std::size_t i = 0; i < sizeof bits; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::size_t offset() const noexcept { return pos_; }

  std::uint64_t unsigned_le(std::size_t width, const char* what) {
    need(width, what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += width;
    return v;
  }

  float f32(const char* what) {
    const auto bits = static_cast<std::uint32_t>(unsigned_le(4, what));
    return std::bit_cast<float>(bits);
  }

  std::string take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) throw FormatError(std::string("truncated LFS payload reading ") + what, pos_);
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void LabeledFeatureSet::validate() const {
  if (count == 0 || dimension == 0) throw std::invalid_argument("feature set needs at least one sample and dimension");
  if (class_count == 0) throw std::invalid_argument("feature set needs at least one class");
  if (features.size() != count * dimension || labels.size() != count) {
    throw std::invalid_argument("feature set arrays do not match its declared shape");
  }
  std::vector<std::size_t> members(class_count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    if (labels[i] >= class_count) {
      throw std::invalid_argument("sample " + std::to_string(i) + " has label " + std::to_string(labels[i]) +
                                  " outside [0, " + std::to_string(class_count) + ")");
    }
    ++members[labels[i]];
  }
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!std::isfinite(features[i])) {
      throw std::invalid_argument("sample " + std::to_string(i / dimension) + " has a non-finite feature");
    }
  }
  for (std::size_t c = 0; c < class_count; ++c) {
    if (members[c] < 2) {
      throw std::invalid_argument("class " + std::to_string(c) + " has " + std::to_string(members[c]) +
                                  " member(s); at least 2 are required");
    }
  }
}

std::string encode_lfs(const LabeledFeatureSet& set) {
  if (set.metadata.size() > 0xffff) throw std::invalid_argument("LFS metadata longer than 65535 bytes");
  std::string out(kMagic, 4);
  out.push_back(static_cast<char>(kVersion));
  put(out, static_cast<std::uint32_t>(set.count));
  put(out, static_cast<std::uint32_t>(set.dimension));
  put(out, static_cast<std::uint32_t>(set.class_count));
  put(out, static_cast<std::uint16_t>(set.metadata.size()));
  out += set.metadata;
  out.reserve(out.size() + set.count * (4 + 4 * set.dimension));
  for (std::size_t i = 0; i < set.count; ++i) {
    put(out, set.labels[i]);
    for (std::size_t k = 0; k < set.dimension; ++k) put(out, static_cast<float>(set.features[i * set.dimension + k]));
  }
  return out;
}

LabeledFeatureSet decode_lfs(const std::string& bytes) {
  Reader in(bytes);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad LFS magic", 0);
  in.take(4, "magic");
  const auto version = in.unsigned_le(1, "version");
  if (version != kVersion) throw FormatError("unsupported LFS version " + std::to_string(version), 4);
  LabeledFeatureSet set;
  set.count = in.unsigned_le(4, "N");
  set.dimension = in.unsigned_le(4, "d");
  set.class_count = in.unsigned_le(4, "C");
  const auto meta_len = in.unsigned_le(2, "metadata length");
  set.metadata = in.take(meta_len, "metadata");

  const std::size_t record = 4 + 4 * set.dimension;
  const std::size_t remaining = bytes.size() - in.offset();
  if (set.dimension == 0 || remaining / record < set.count) {
    throw FormatError("truncated LFS payload: " + std::to_string(set.count) + " records of " +
                          std::to_string(record) + " bytes declared",
                      in.offset());
  }
  set.features.resize(set.count * set.dimension);
  set.labels.resize(set.count);
  for (std::size_t i = 0; i < set.count; ++i) {
    const auto at = in.offset();
    const auto label = in.unsigned_le(4, "label");
    if (label >= set.class_count) {
      throw FormatError("label " + std::to_string(label) + " out of range for " + std::to_string(set.class_count) +
                            " classes",
                        at);
    }
    set.labels[i] = static_cast<std::uint32_t>(label);
    for (std::size_t k = 0; k < set.dimension; ++k) {
      const auto fat = in.offset();
      const float v = in.f32("feature");
      if (!std::isfinite(v)) throw FormatError("non-finite feature in record " + std::to_string(i), fat);
      set.features[i * set.dimension + k] = v;
    }
  }
  if (in.offset() != bytes.size()) throw FormatError("trailing bytes after the last LFS record", in.offset());
  set.validate();
  return set;
}

LabeledFeatureSet parse_feature_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV feature file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    std::string cell;
    while (std::getline(h, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header[0] != "label") {
    throw std::invalid_argument("CSV header must be label,f0,...,f{d-1}");
  }
  for (std::size_t k = 1; k < header.size(); ++k) {
    if (header[k] != "f" + std::to_string(k - 1)) {
      throw std::invalid_argument("CSV header column " + std::to_string(k + 1) + " should be f" + std::to_string(k - 1));
    }
  }
  LabeledFeatureSet set;
  set.dimension = header.size() - 1;
  std::size_t row = 1;
  std::uint32_t max_label = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream r(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(r, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) {
      throw std::invalid_argument("CSV row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                                  " cells");
    }
    try {
      std::size_t used = 0;
      const long long label = std::stoll(cells[0], &used);
      if (used != cells[0].size() || label < 0 || label > 0xffffffffLL) throw std::invalid_argument("label");
      set.labels.push_back(static_cast<std::uint32_t>(label));
      max_label = std::max(max_label, static_cast<std::uint32_t>(label));
      for (std::size_t k = 1; k < cells.size(); ++k) {
        const double v = std::stod(cells[k], &used);
        if (used != cells[k].size()) throw std::invalid_argument("value");
        set.features.push_back(v);
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("CSV row " + std::to_string(row) + ": malformed number");
    }
  }
  set.count = set.labels.size();
  set.class_count = set.count ? max_label + 1 : 0;
  set.validate();
  return set;
}

LabeledFeatureSet load_feature_set(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) return decode_lfs(bytes);
  if (path.extension() == ".lfs") return decode_lfs(bytes);
  return parse_feature_csv(bytes);
}

void save_lfs(const std::filesystem::path& path, const LabeledFeatureSet& set) {
  set.validate();
  write_file_atomic(path, encode_lfs(set));
}

}  // namespace rdm
