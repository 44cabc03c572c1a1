#include "core/textio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace hesselm::textio {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_doubles(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != 0) out += ' ';
    out += format_double(values[i]);
  }
  return out;
}

double parse_double_strict(const std::string& text, const std::string& context) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(context + ": not a number: '" + text + "'");
  }
  return v;
}

long long parse_int_strict(const std::string& text, const std::string& context) {
  long long v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(context + ": not an integer: '" + text + "'");
  }
  return v;
}

std::vector<double> parse_double_list(const std::string& line, std::size_t expected,
                                      const std::string& context) {
  std::vector<double> out;
  out.reserve(expected);
  std::istringstream in(line);
  std::string token;
  while (in >> token) out.push_back(parse_double_strict(token, context));
  if (out.size() != expected) {
    throw ParseError(context + ": expected " + std::to_string(expected) + " values, got " +
                     std::to_string(out.size()));
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

LineReader::LineReader(std::vector<std::string> lines, std::string name)
    : lines_(std::move(lines)), name_(std::move(name)) {}

LineReader LineReader::from_file(const std::string& path) {
  return from_string(read_text_file(path), path);
}

LineReader LineReader::from_string(std::string text, std::string name) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return LineReader(std::move(lines), std::move(name));
}

std::string LineReader::next(const std::string& what) {
  if (auto line = try_next()) return *line;
  throw ParseError(name_ + ": truncated document, expected " + what);
}

std::optional<std::string> LineReader::try_next() {
  while (pos_ < lines_.size()) {
    std::string line = trim(lines_[pos_]);
    ++pos_;
    ++line_no_;
    if (!line.empty()) return line;
  }
  return std::nullopt;
}

std::string LineReader::expect_value(const std::string& key) {
  std::string line = next("'" + key + "'");
  std::size_t eq = line.find('=');
  if (eq == std::string::npos) {
    throw ParseError(name_ + " line " + std::to_string(line_no_) + ": expected '" + key +
                     " = ...', got '" + line + "'");
  }
  std::string k = trim(line.substr(0, eq));
  if (k != key) {
    throw ParseError(name_ + " line " + std::to_string(line_no_) + ": expected key '" + key +
                     "', got '" + k + "'");
  }
  return trim(line.substr(eq + 1));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace hesselm::textio
