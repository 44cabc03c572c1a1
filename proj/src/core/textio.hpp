#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hesselm::textio {

// Shortest decimal form that round-trips a double exactly (17 significant
// digits), independent of locale.
std::string format_double(double v);

std::string join_doubles(std::span<const double> values);

double parse_double_strict(const std::string& text, const std::string& context);
long long parse_int_strict(const std::string& text, const std::string& context);
std::vector<double> parse_double_list(const std::string& line, std::size_t expected,
                                      const std::string& context);

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& line, char sep);

// Line-oriented reader for the versioned key-value documents the toolkit
// persists. Raises ParseError with line context on any deviation.
class LineReader {
public:
  static LineReader from_file(const std::string& path);
  static LineReader from_string(std::string text, std::string name);

  // next non-empty line; ParseError mentioning `what` when the document ends
  std::string next(const std::string& what);

  // next non-empty line, or nothing at end of document
  std::optional<std::string> try_next();

  // parses "key = value" and checks the key
  std::string expect_value(const std::string& key);

  const std::string& name() const { return name_; }
  std::size_t line_number() const { return line_no_; }

private:
  LineReader(std::vector<std::string> lines, std::string name);

  std::vector<std::string> lines_;
  std::string name_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace hesselm::textio
