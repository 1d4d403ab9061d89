#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glmp/diagnostics.hpp"
#include "glmp/model.hpp"

namespace glmp {

/// A `.glmp` document. Text is UTF-8; newlines are normalized to LF on
/// construction through from_text / from_file.
struct ModelSource {
  std::string text;
  std::string origin = "<inline>";

  static ModelSource from_text(std::string_view text, std::string origin = "<inline>");
  /// Throws std::system_error when the file cannot be read.
  static ModelSource from_file(const std::filesystem::path& path);
};

std::string normalize_newlines(std::string_view text);

struct ParseResult {
  std::optional<GlmpModel> model;
  Diagnostics diagnostics;

  bool ok() const noexcept { return model.has_value(); }
};

/// Parses and validates a model document. Total: any input yields either a
/// model or a non-empty list of error diagnostics ordered by position.
///
/// Grammar (keywords case-insensitive, `#` starts a comment):
///
///     variable <name> labels <name>+ [partition (l, p, r)+] [relevance (r, ...)]
///     measure <name> unit "<unit>" [range (<lo> <hi> | cohort)] [invert]
///         source (text|audio|video) [as <variable>] [template "<text>"]
///     (attribute|dimension|skill) <name> from <name> {, <name>} [as <variable>]
///         using (rules { if <in> is <label> {and <in> is <label>} then <label> ; ... }
///                | weights (<w>, ...)) [template "<text>"]
///
/// Names are bare identifiers or double-quoted strings.
ParseResult parse_model(const ModelSource& src);

/// Structural checks: DAG, level ordering, aggregation arity, rule base
/// completeness and consistency, weights, templates and usage. Empty (or
/// warnings only) iff the model is evaluable.
Diagnostics validate_model(const GlmpModel& model);

/// Canonical text. parse(serialize(m)) == m for every valid model, and
/// serializing the re-parsed model reproduces the same bytes.
ModelSource serialize_model(const GlmpModel& model);

/// Rule-base coverage over label combinations of up to three inputs. A
/// combination is a vector of label indices, one per input.
struct RuleCoverage {
  std::vector<std::vector<std::size_t>> missing;
  std::vector<std::vector<std::size_t>> conflicting;
  /// Indices of rules identical to an earlier one.
  std::vector<std::size_t> duplicates;
};

RuleCoverage check_rule_coverage(const std::vector<FuzzyRule>& rules,
                                 const std::vector<std::size_t>& label_counts);

/// Quotes a name when it is not a bare identifier or collides with a keyword.
std::string quote_name(std::string_view name);

}  // namespace glmp
