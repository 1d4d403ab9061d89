#include "glmp/diagnostics.hpp"

#include <algorithm>

namespace glmp {

std::string format(const Diagnostic& d) {
  return d.code + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) +
         ": " + (d.severity == Severity::Error ? "error" : "warning") + ": " + d.message;
}

bool has_errors(const Diagnostics& ds) {
  return std::any_of(ds.begin(), ds.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

void sort_by_position(Diagnostics& ds) {
  std::stable_sort(ds.begin(), ds.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return a.span.offset < b.span.offset;
  });
}

}  // namespace glmp
