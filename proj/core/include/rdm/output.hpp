#pragma once

// Number formatting and file emission shared by every writer.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rdm {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that round-trips to the value rounded to 12
/// significant digits. Infinities print as "inf"/"-inf", NaN as "nan".
std::string format_number(double value);

/// The value rounded to 12 significant digits (what format_number prints).
double round_significant(double value);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Creates the directory (and parents) or throws IoError.
void ensure_directory(const std::filesystem::path& dir);

/// Minimal CSV builder; cells are joined with commas, rows end with '\n'.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);
  CsvWriter& row(const std::vector<std::string>& cells);
  const std::string& str() const noexcept { return text_; }

 private:
  std::string text_;
  std::size_t width_;
};

}  // namespace rdm
