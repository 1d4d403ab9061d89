#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "glmp/network.hpp"

namespace glmp {

/// Raised when a pre-report document does not match the expected schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kPreReportSchema = "glmp-prereport/1";

/// One component of the hierarchy with its rendered label. A component that
/// is reachable through several parents is expanded once; later occurrences
/// are leaves with `ref` set.
struct PreReportNode {
  std::string component;
  std::string level;       // "skill", "dimension", "attribute" or "measure"
  std::string label;       // five-bin rendering, e.g. "M/H"
  std::string label_text;  // e.g. "Medium/High"
  std::vector<std::string> labels;  // label set of the output variable
  std::vector<double> validity;
  std::string text_template;
  std::optional<double> raw;
  std::optional<double> normalized;
  bool ref = false;
  std::vector<PreReportNode> children;

  /// Position on the half-step scale (0 .. 2*(labels-1)).
  std::size_t half_step() const;
  std::size_t node_count() const;
};

struct PreReport {
  std::string student;
  std::string task;
  std::string group;
  std::vector<PreReportNode> skills;
};

/// One tree per skill, in declaration order; children follow the order of
/// the PM's inputs.
PreReport build_prereport(const EvaluationTrace& trace);

/// Stable key order; ends with a newline.
std::string prereport_to_json(const PreReport& pre);
/// Throws SchemaError.
PreReport prereport_from_json(std::string_view text);

struct SkillSection {
  std::string skill;
  std::string label;
  std::string summary;
  std::vector<std::string> strengths;
  std::vector<std::string> improvements;
  /// One paragraph per direct child of the skill.
  std::vector<std::string> explanations;
};

struct ReportDocument {
  std::string student;
  std::string task;
  std::string group;
  std::vector<SkillSection> sections;

  std::string markdown() const;
};

/// Fills the node's template. Throws SchemaError on a template that does
/// not parse or names an unknown child.
std::string fill_template(const PreReportNode& node);

/// Deterministic text rendering. Consecutive siblings that share a label
/// are described in a single sentence.
ReportDocument render_text(const PreReport& pre);

/// Words that must not appear in student-facing text.
const std::vector<std::string>& default_jargon_blocklist();
/// Blocklisted terms found in `text` (whole words, case-insensitive).
std::vector<std::string> find_jargon(std::string_view text,
                                     const std::vector<std::string>& blocklist);

struct PromptPackage {
  std::string template_id;
  std::string text;
};

inline constexpr std::string_view kDefaultPromptId = "feedback-report/1";

/// Default prompt template. Placeholders: {student}, {task}, {strengths},
/// {improvements}, {prereport}.
std::string_view default_prompt_template();

PromptPackage emit_prompt_package(const PreReport& pre,
                                  std::string_view prompt_template = default_prompt_template(),
                                  std::string template_id = std::string(kDefaultPromptId));

}  // namespace glmp
