#include "lgallee/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "lgallee/errors.hpp"

namespace lgallee {

namespace {

void check_cell(std::string_view cell) {
  if (cell.find_first_of(",\n\r") != std::string_view::npos) {
    throw ValidationError("report cell may not contain ',' or a line break: " + std::string(cell));
  }
}

void check_header(std::string_view key, std::string_view value) {
  if (key.empty() || key.find_first_of(":\n\r") != std::string_view::npos || key.front() == ' ') {
    throw ValidationError("bad report header key: " + std::string(key));
  }
  if (value.find_first_of("\n\r") != std::string_view::npos) {
    throw ValidationError("report header value may not contain a line break");
  }
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return out;
}

void append_csv(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) {
      out += ',';
    }
    out += cells[i];
  }
  out += '\n';
}

} // namespace

void Report::set(std::string key, std::string value) {
  check_header(key, value);
  for (auto& [k, v] : header) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  header.emplace_back(std::move(key), std::move(value));
}

const std::string& Report::get(std::string_view key) const {
  for (const auto& [k, v] : header) {
    if (k == key) {
      return v;
    }
  }
  throw ValidationError("report has no header key '" + std::string(key) + "'");
}

void Report::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) {
    throw ValidationError("report row has " + std::to_string(row.size()) + " cells, expected " +
                          std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

std::size_t Report::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) {
      return i;
    }
  }
  throw ValidationError("report has no column '" + std::string(name) + "'");
}

std::string Report::serialize() const {
  check_header("kind", kind);
  if (columns.empty()) {
    throw ValidationError("report needs at least one column");
  }
  std::string out;
  out += magic;
  out += '\n';
  out += "#kind: " + kind + '\n';
  for (const auto& [k, v] : header) {
    check_header(k, v);
    out += '#' + k + ": " + v + '\n';
  }
  for (const auto& c : columns) {
    check_cell(c);
  }
  append_csv(out, columns);
  for (const auto& r : rows) {
    if (r.size() != columns.size()) {
      throw ValidationError("report row width mismatch");
    }
    for (const auto& c : r) {
      check_cell(c);
    }
    append_csv(out, r);
  }
  return out;
}

Report Report::parse(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      throw ValidationError("report must end with a newline");
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  if (lines.empty() || lines[0] != magic) {
    throw ValidationError("not an lgallee report (missing '" + std::string(magic) + "')");
  }
  Report r;
  std::size_t i = 1;
  bool have_kind = false;
  for (; i < lines.size() && !lines[i].empty() && lines[i][0] == '#'; ++i) {
    const std::string_view line = lines[i].substr(1);
    const auto sep = line.find(": ");
    if (sep == std::string_view::npos) {
      throw ValidationError("malformed report header line: " + std::string(lines[i]));
    }
    const std::string key(line.substr(0, sep));
    std::string value(line.substr(sep + 2));
    if (key == "kind" && !have_kind) {
      r.kind = std::move(value);
      have_kind = true;
    } else {
      check_header(key, value);
      r.header.emplace_back(key, std::move(value));
    }
  }
  if (!have_kind) {
    throw ValidationError("report header lacks '#kind'");
  }
  if (i >= lines.size()) {
    throw ValidationError("report lacks a column row");
  }
  r.columns = split_csv(lines[i++]);
  for (; i < lines.size(); ++i) {
    auto row = split_csv(lines[i]);
    if (row.size() != r.columns.size()) {
      throw ValidationError("report row " + std::to_string(i + 1) + " has the wrong number of cells");
    }
    r.rows.push_back(std::move(row));
  }
  return r;
}

std::string fmt(double x) {
  if (std::isnan(x)) {
    return "nan";
  }
  if (std::isinf(x)) {
    return x > 0 ? "inf" : "-inf";
  }
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string fmt(int x) { return std::to_string(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }

double parse_double(std::string_view s) {
  if (s == "nan") {
    return std::nan("");
  }
  if (s == "inf") {
    return HUGE_VAL;
  }
  if (s == "-inf") {
    return -HUGE_VAL;
  }
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ValidationError("not a number: '" + std::string(s) + "'");
  }
  return x;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  }
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open " + tmp.string() + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace lgallee
