#include <set>
#include <sstream>

#include "glmp/dsl.hpp"
#include "glmp/names.hpp"
#include "glmp/numfmt.hpp"

namespace glmp {

namespace {

const std::set<std::string, std::less<>>& reserved_words() {
  static const std::set<std::string, std::less<>> words{
      "variable", "measure", "attribute", "dimension", "skill",   "labels",  "partition",
      "relevance", "unit",   "range",     "cohort",    "invert",  "source",  "as",
      "from",     "using",   "rules",     "weights",   "if",      "is",      "and",
      "then",     "template"};
  return words;
}

bool is_bare(std::string_view s) {
  if (s.empty()) return false;
  const auto c0 = static_cast<unsigned char>(s.front());
  if (!((c0 >= 'a' && c0 <= 'z') || (c0 >= 'A' && c0 <= 'Z') || c0 == '_' || c0 >= 0x80)) {
    return false;
  }
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-' || c >= 0x80;
    if (!ok) return false;
  }
  std::string lower(s);
  for (char& c : lower) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return reserved_words().count(lower) == 0;
}

std::string quote_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out + "\"";
}

std::string display_name(const GlmpModel& m, const std::string& key) {
  if (const PerceptionMapping* pm = m.find_pm(key)) return quote_name(pm->name);
  return quote_name(key);
}

void write_variable(std::ostream& os, const LinguisticVariable& v) {
  os << "variable " << quote_name(v.name()) << " labels";
  for (const auto& l : v.labels()) os << ' ' << quote_name(l);
  if (!v.has_default_partition()) {
    os << " partition";
    for (const auto& f : v.partition()) {
      os << " (" << format_decimal(f.left) << ", " << format_decimal(f.peak) << ", "
         << format_decimal(f.right) << ')';
    }
  }
  if (!v.has_default_relevance()) {
    os << " relevance (";
    for (Eigen::Index i = 0; i < v.relevance().size(); ++i) {
      os << (i ? ", " : "") << format_decimal(v.relevance()(i));
    }
    os << ')';
  }
  os << '\n';
}

void write_output_and_template(std::ostream& os, const GlmpModel& m, const PerceptionMapping& pm,
                               bool with_as) {
  if (with_as && pm.output != kDefaultVariable) {
    const VariablePtr var = m.output_of(pm);
    os << " as " << quote_name(var ? var->name() : pm.output);
  }
  if (!with_as && pm.text_template) os << " template " << quote_string(*pm.text_template);
}

void write_measure(std::ostream& os, const GlmpModel& m, const PerceptionMapping& pm) {
  const MeasureSpec* spec = m.find_measure(pm.name);
  os << "measure " << quote_name(pm.name);
  if (spec) {
    os << " unit " << quote_string(spec->unit);
    if (spec->cohort_range) {
      os << " range cohort";
    } else {
      os << " range " << format_decimal(spec->lo) << ' ' << format_decimal(spec->hi);
    }
    if (spec->invert) os << " invert";
    os << " source " << to_string(spec->source);
  }
  write_output_and_template(os, m, pm, true);
  write_output_and_template(os, m, pm, false);
  os << '\n';
}

void write_mapping(std::ostream& os, const GlmpModel& m, const PerceptionMapping& pm) {
  os << to_string(pm.level) << ' ' << quote_name(pm.name) << " from ";
  for (std::size_t i = 0; i < pm.inputs.size(); ++i) {
    os << (i ? ", " : "") << display_name(m, pm.inputs[i]);
  }
  write_output_and_template(os, m, pm, true);
  if (pm.aggregation == Aggregation::WeightedAverage) {
    os << " using weights (";
    for (std::size_t i = 0; i < pm.weights.size(); ++i) {
      os << (i ? ", " : "") << format_decimal(pm.weights[i]);
    }
    os << ')';
  } else {
    const VariablePtr out = m.output_of(pm);
    os << " using rules {\n";
    for (const auto& rule : pm.rules) {
      os << "  if ";
      for (std::size_t a = 0; a < rule.antecedents.size(); ++a) {
        const auto [input, label] = rule.antecedents[a];
        const std::string& key = pm.inputs.at(input);
        const PerceptionMapping* in = m.find_pm(key);
        const VariablePtr var = in ? m.output_of(*in) : nullptr;
        os << (a ? " and " : "") << display_name(m, key) << " is "
           << quote_name(var ? var->labels().at(label) : std::to_string(label));
      }
      os << " then "
         << quote_name(out ? out->labels().at(rule.consequent) : std::to_string(rule.consequent))
         << ";\n";
    }
    os << '}';
  }
  write_output_and_template(os, m, pm, false);
  os << '\n';
}

}  // namespace

std::string quote_name(std::string_view name) {
  return is_bare(name) ? std::string(name) : quote_string(name);
}

ModelSource serialize_model(const GlmpModel& model) {
  std::ostringstream os;
  bool any = false;
  for (const auto& decl : model.variables) {
    if (!decl.declared) continue;
    write_variable(os, *decl.variable);
    any = true;
  }
  bool previous_was_measure = false;
  for (const auto& pm : model.pms) {
    const bool is_measure = pm.level == Level::Measure;
    if (any && !(is_measure && previous_was_measure)) os << '\n';
    if (is_measure) write_measure(os, model, pm);
    else write_mapping(os, model, pm);
    previous_was_measure = is_measure;
    any = true;
  }
  return {os.str(), "<serialized>"};
}

}  // namespace glmp
