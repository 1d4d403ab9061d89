#include "glmp/text_template.hpp"

namespace glmp {

ParsedTemplate parse_template(std::string_view tpl) {
  ParsedTemplate out;
  std::string literal;
  const auto flush = [&] {
    if (!literal.empty()) out.parts.push_back({TemplatePart::Kind::Text, std::move(literal)});
    literal.clear();
  };
  for (std::size_t i = 0; i < tpl.size(); ++i) {
    const char c = tpl[i];
    if (c == '}' && i + 1 < tpl.size() && tpl[i + 1] == '}') {
      literal.push_back('}');
      ++i;
      continue;
    }
    if (c != '{') {
      literal.push_back(c);
      continue;
    }
    if (i + 1 < tpl.size() && tpl[i + 1] == '{') {
      literal.push_back('{');
      ++i;
      continue;
    }
    const std::size_t close = tpl.find('}', i + 1);
    if (close == std::string_view::npos) {
      out.error = "unterminated placeholder";
      return out;
    }
    const std::string_view body = tpl.substr(i + 1, close - i - 1);
    flush();
    if (body == "component") {
      out.parts.push_back({TemplatePart::Kind::Component, {}});
    } else if (body == "label") {
      out.parts.push_back({TemplatePart::Kind::Label, {}});
    } else if (body.substr(0, 6) == "child:" && body.size() > 6) {
      out.parts.push_back({TemplatePart::Kind::Child, std::string(body.substr(6))});
    } else {
      out.error = "unknown placeholder {" + std::string(body) + "}";
      return out;
    }
    i = close;
  }
  flush();
  return out;
}

}  // namespace glmp
