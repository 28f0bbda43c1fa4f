#pragma once

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hqlab {

using Json = nlohmann::json;

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);
/// SHA-256 of a file's bytes. Throws std::runtime_error if unreadable.
std::string sha256_file(const std::filesystem::path& path);

/// Fixed-point decimal with `precision` digits; negative zero prints as 0.
std::string fixed(double x, int precision = 10);

/// Short stable tag of a coefficient vector (first 16 hex digits of SHA-256
/// over the fixed-precision text).
std::string coeffs_hash(const std::vector<double>& coeffs);

/// Comma-separated table with LF line ends, written in one go.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add(std::vector<std::string> row);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes text verbatim (binary mode), creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);
/// Indented JSON with sorted keys and a trailing newline.
void write_json(const std::filesystem::path& path, const Json& doc);

}  // namespace hqlab
