#include "glmp/numfmt.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace glmp {

std::string format_decimal(double v) {
  // Fixed notation of the largest doubles needs ~310 digits; smallest ~1080.
  std::array<char, 1200> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

std::optional<double> parse_decimal(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace glmp
