#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lgallee {

/// Line-oriented table file: a header block of `#key: value` lines after the
/// `#lgallee-report v1` marker, then one CSV header row and the data rows.
/// Cells are stored as text, so parse(serialize(r)) == r and
/// serialize(parse(text)) == text for every file produced here.
struct Report {
  static constexpr std::string_view magic = "#lgallee-report v1";

  std::string kind;
  std::vector<std::pair<std::string, std::string>> header; ///< after "kind"
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void set(std::string key, std::string value);
  /// Value of a header key; throws ValidationError when missing.
  const std::string& get(std::string_view key) const;
  void add_row(std::vector<std::string> row);
  /// Column index by name; throws ValidationError when missing.
  std::size_t column(std::string_view name) const;

  std::string serialize() const;
  /// Throws ValidationError on malformed input.
  static Report parse(std::string_view text);

  friend bool operator==(const Report&, const Report&) = default;
};

/// Shortest decimal form that reads back to the same double.
std::string fmt(double x);
std::string fmt(int x);
std::string fmt(std::size_t x);
/// Reads a number written by fmt(); throws ValidationError otherwise.
double parse_double(std::string_view s);

/// Writes via a temporary file in the same directory and renames it into
/// place. Throws IoError.
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

} // namespace lgallee
