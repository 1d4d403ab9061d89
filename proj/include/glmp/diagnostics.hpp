#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace glmp {

enum class Severity { Warning, Error };

/// Location in a newline-normalized source. `line` and `column` are 1-based
/// (columns count bytes); `offset` is the 0-based byte offset.
struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t length = 0;
  std::size_t offset = 0;
};

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  SourceSpan span;
};

using Diagnostics = std::vector<Diagnostic>;

/// `code:line:col: severity: message`
std::string format(const Diagnostic& d);

bool has_errors(const Diagnostics& ds);

/// Stable sort by source offset.
void sort_by_position(Diagnostics& ds);

namespace diag {
// Stable diagnostic codes.
inline constexpr std::string_view kSyntax = "syntax";
inline constexpr std::string_view kEncoding = "encoding";
inline constexpr std::string_view kUnknownIdentifier = "unknown-identifier";
inline constexpr std::string_view kUnknownLabel = "unknown-label";
inline constexpr std::string_view kDuplicate = "duplicate-definition";
inline constexpr std::string_view kRuleHole = "rule-hole";
inline constexpr std::string_view kRuleConflict = "rule-conflict";
inline constexpr std::string_view kRuleDuplicate = "rule-duplicate";
inline constexpr std::string_view kArity = "arity";
inline constexpr std::string_view kCycle = "cycle";
inline constexpr std::string_view kOrder = "order";
inline constexpr std::string_view kNoSkill = "no-skill";
inline constexpr std::string_view kUnused = "unused";
inline constexpr std::string_view kPartition = "partition";
inline constexpr std::string_view kRange = "range";
inline constexpr std::string_view kDegenerateRange = "degenerate-range";
inline constexpr std::string_view kTemplate = "template";
inline constexpr std::string_view kVariable = "variable";
inline constexpr std::string_view kWeights = "weights";
inline constexpr std::string_view kTooManyErrors = "too-many-errors";
// Ingestion.
inline constexpr std::string_view kMalformed = "malformed";
inline constexpr std::string_view kNonNumeric = "non-numeric";
inline constexpr std::string_view kUnknownMeasure = "unknown-measure";
inline constexpr std::string_view kMissingMeasure = "missing-measure";
inline constexpr std::string_view kDuplicateBundle = "duplicate-bundle";
inline constexpr std::string_view kStudentCode = "student-code";
}  // namespace diag

}  // namespace glmp
