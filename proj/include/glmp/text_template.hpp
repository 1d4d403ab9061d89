#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace glmp {

/// Piece of a PM text template. Placeholders are `{component}`, `{label}`
/// and `{child:<input name>}`; `{{` and `}}` produce literal braces.
struct TemplatePart {
  enum class Kind { Text, Component, Label, Child };
  Kind kind = Kind::Text;
  /// Literal text, or the child name for Kind::Child.
  std::string text;
};

struct ParsedTemplate {
  std::vector<TemplatePart> parts;
  std::optional<std::string> error;
};

ParsedTemplate parse_template(std::string_view tpl);

}  // namespace glmp
