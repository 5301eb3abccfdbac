#pragma once

#include <string>
#include <vector>

namespace mg1 {

/// Round-trip decimal form of a double: 17 significant digits, '.' separator.
std::string format_number(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells);
  std::string str() const;

  /// Writes to `path` through a temporary sibling file and a rename, so a
  /// failed run never leaves a partial file behind.
  void write_atomic(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace mg1
