#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace glmp::csv {

struct Row {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Comma-separated records with RFC 4180 quoting. Blank lines are skipped.
std::vector<Row> parse(std::string_view text);

std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

}  // namespace glmp::csv
