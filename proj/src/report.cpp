#include "glmp/report.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"

#include "glmp/names.hpp"
#include "glmp/text_template.hpp"

namespace glmp {

using ojson = nlohmann::ordered_json;

std::size_t PreReportNode::half_step() const {
  const auto index_of = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == name) return i;
    }
    throw SchemaError("label '" + std::string(name) + "' of '" + component +
                      "' is not in its label set");
  };
  const auto slash = label_text.find('/');
  if (slash == std::string::npos) return 2 * index_of(label_text);
  return index_of(std::string_view(label_text).substr(0, slash)) +
         index_of(std::string_view(label_text).substr(slash + 1));
}

std::size_t PreReportNode::node_count() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.node_count();
  return n;
}

namespace {

PreReportNode build_node(const EvaluationTrace& trace, std::size_t pm_index,
                         std::set<std::size_t>& expanded) {
  const GlmpModel& m = *trace.model;
  const PerceptionMapping& pm = m.pms[pm_index];
  const PmStep& step = trace.step(pm_index);
  const VariablePtr var = m.output_of(pm);
  PreReportNode node;
  node.component = pm.name;
  node.level = std::string(to_string(pm.level));
  node.label = step.outcome.rendered;
  node.label_text = label_text(*var, step.outcome);
  node.labels = var->labels();
  node.validity.assign(step.output.validity.data(),
                       step.output.validity.data() + step.output.validity.size());
  node.text_template = std::string(m.effective_template(pm));
  node.raw = step.raw;
  node.normalized = step.normalized;
  if (!expanded.insert(pm_index).second) {
    node.ref = true;
    return node;
  }
  if (pm.level == Level::Measure) return node;
  std::vector<std::size_t> inputs;
  for (const auto& key : pm.inputs) {
    auto idx = m.pm_index(key);
    if (idx && std::find(inputs.begin(), inputs.end(), *idx) == inputs.end()) {
      inputs.push_back(*idx);
    }
  }
  for (std::size_t idx : inputs) node.children.push_back(build_node(trace, idx, expanded));
  return node;
}

ojson node_to_json(const PreReportNode& n) {
  ojson j;
  j["component"] = n.component;
  j["level"] = n.level;
  j["label"] = n.label;
  j["label_text"] = n.label_text;
  j["labels"] = n.labels;
  j["validity"] = n.validity;
  j["template"] = n.text_template;
  if (n.raw) j["raw"] = *n.raw;
  if (n.normalized) j["normalized"] = *n.normalized;
  if (n.ref) {
    j["ref"] = true;
  } else {
    j["children"] = ojson::array();
    for (const auto& c : n.children) j["children"].push_back(node_to_json(c));
  }
  return j;
}

const ojson& member(const ojson& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(where + ": missing \"" + key + "\"");
  }
  return j.at(key);
}

std::string string_member(const ojson& j, const char* key, const std::string& where) {
  const ojson& v = member(j, key, where);
  if (!v.is_string()) throw SchemaError(where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

PreReportNode node_from_json(const ojson& j, const std::string& where) {
  PreReportNode n;
  n.component = string_member(j, "component", where);
  const std::string here = where + "/" + n.component;
  n.level = string_member(j, "level", here);
  if (!parse_level(n.level)) throw SchemaError(here + ": unknown level '" + n.level + "'");
  n.label = string_member(j, "label", here);
  n.label_text = string_member(j, "label_text", here);
  n.text_template = string_member(j, "template", here);
  const ojson& labels = member(j, "labels", here);
  if (!labels.is_array() || labels.size() < 2) {
    throw SchemaError(here + ": \"labels\" must be an array of at least two strings");
  }
  for (const auto& l : labels) {
    if (!l.is_string()) throw SchemaError(here + ": \"labels\" must contain strings");
    n.labels.push_back(l.get<std::string>());
  }
  const ojson& validity = member(j, "validity", here);
  if (!validity.is_array() || validity.size() != n.labels.size()) {
    throw SchemaError(here + ": \"validity\" must have one number per label");
  }
  for (const auto& w : validity) {
    if (!w.is_number()) throw SchemaError(here + ": \"validity\" must contain numbers");
    n.validity.push_back(w.get<double>());
  }
  for (const char* key : {"raw", "normalized"}) {
    if (!j.contains(key)) continue;
    if (!j.at(key).is_number()) throw SchemaError(here + ": \"" + key + "\" must be a number");
    (std::string_view(key) == "raw" ? n.raw : n.normalized) = j.at(key).get<double>();
  }
  n.half_step();  // checks that the label belongs to the label set
  if (j.contains("ref")) {
    if (!j.at("ref").is_boolean()) throw SchemaError(here + ": \"ref\" must be a boolean");
    n.ref = j.at("ref").get<bool>();
  }
  if (j.contains("children")) {
    const ojson& children = j.at("children");
    if (!children.is_array()) throw SchemaError(here + ": \"children\" must be an array");
    for (const auto& c : children) n.children.push_back(node_from_json(c, here));
  }
  return n;
}

const PreReportNode* find_child(const PreReportNode& node, std::string_view name) {
  const std::string key = name_key(name);
  for (const auto& c : node.children) {
    if (name_key(c.component) == key) return &c;
  }
  return nullptr;
}

std::string enumerate(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += (i + 1 == names.size()) ? " and " : ", ";
    out += names[i];
  }
  return out;
}

// Sentences for the children of `node`, merging runs of equal labels.
// Shared components are described where they are first expanded.
void describe_children(const PreReportNode& node, std::vector<std::string>& sentences) {
  std::vector<PreReportNode> cs;
  std::copy_if(node.children.begin(), node.children.end(), std::back_inserter(cs),
               [](const PreReportNode& c) { return !c.ref; });
  for (std::size_t i = 0; i < cs.size();) {
    std::size_t j = i + 1;
    while (j < cs.size() && cs[j].label_text == cs[i].label_text) ++j;
    if (j - i == 1) {
      sentences.push_back(fill_template(cs[i]));
    } else {
      std::vector<std::string> names;
      for (std::size_t k = i; k < j; ++k) names.push_back(cs[k].component);
      sentences.push_back(enumerate(names) + " are " + cs[i].label_text + ".");
    }
    i = j;
  }
  for (const auto& c : cs) {
    if (!c.children.empty()) describe_children(c, sentences);
  }
}

std::string join_sentences(const std::vector<std::string>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

void collect_extremes(const PreReportNode& node, std::vector<std::string>& strengths,
                      std::vector<std::string>& improvements) {
  for (const auto& c : node.children) {
    if (c.ref) continue;
    const std::size_t top = 2 * (c.labels.size() - 1);
    const std::size_t h = c.half_step();
    const std::string item = c.component + " (" + c.label_text + ")";
    if (h + 1 >= top) strengths.push_back(item);
    else if (h <= 1) improvements.push_back(item);
    collect_extremes(c, strengths, improvements);
  }
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string bullet_list(const std::vector<std::string>& items, std::string_view empty) {
  if (items.empty()) return std::string(empty) + "\n";
  std::string out;
  for (const auto& i : items) out += "- " + i + "\n";
  return out;
}

}  // namespace

PreReport build_prereport(const EvaluationTrace& trace) {
  PreReport pre;
  pre.student = trace.student;
  pre.task = trace.task;
  pre.group = trace.group;
  for (std::size_t s : trace.model->skills()) {
    std::set<std::size_t> expanded;
    pre.skills.push_back(build_node(trace, s, expanded));
  }
  return pre;
}

std::string prereport_to_json(const PreReport& pre) {
  ojson j;
  j["schema"] = kPreReportSchema;
  j["student"] = pre.student;
  j["task"] = pre.task;
  j["group"] = pre.group;
  j["skills"] = ojson::array();
  for (const auto& s : pre.skills) j["skills"].push_back(node_to_json(s));
  return j.dump(2) + "\n";
}

PreReport prereport_from_json(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw SchemaError(std::string("not valid JSON: ") + e.what());
  }
  const std::string where = "pre-report";
  if (string_member(j, "schema", where) != kPreReportSchema) {
    throw SchemaError(where + ": unsupported schema '" + j.at("schema").get<std::string>() + "'");
  }
  PreReport pre;
  pre.student = string_member(j, "student", where);
  pre.task = string_member(j, "task", where);
  if (j.contains("group")) pre.group = string_member(j, "group", where);
  const ojson& skills = member(j, "skills", where);
  if (!skills.is_array()) throw SchemaError(where + ": \"skills\" must be an array");
  if (skills.empty()) throw SchemaError(where + ": no skills to report");
  for (const auto& s : skills) pre.skills.push_back(node_from_json(s, where));
  return pre;
}

std::string fill_template(const PreReportNode& node) {
  const ParsedTemplate tpl = parse_template(node.text_template);
  if (tpl.error) throw SchemaError("template of '" + node.component + "': " + *tpl.error);
  std::string out;
  for (const auto& part : tpl.parts) {
    switch (part.kind) {
      case TemplatePart::Kind::Text: out += part.text; break;
      case TemplatePart::Kind::Component: out += node.component; break;
      case TemplatePart::Kind::Label: out += node.label_text; break;
      case TemplatePart::Kind::Child: {
        const PreReportNode* c = find_child(node, part.text);
        if (!c) {
          throw SchemaError("template of '" + node.component + "' names unknown child '" +
                            part.text + "'");
        }
        out += c->label_text;
        break;
      }
    }
  }
  return out;
}

ReportDocument render_text(const PreReport& pre) {
  ReportDocument doc;
  doc.student = pre.student;
  doc.task = pre.task;
  doc.group = pre.group;
  for (const auto& skill : pre.skills) {
    SkillSection sec;
    sec.skill = skill.component;
    sec.label = skill.label_text;
    sec.summary = fill_template(skill);
    collect_extremes(skill, sec.strengths, sec.improvements);
    for (const auto& c : skill.children) {
      std::vector<std::string> sentences{fill_template(c)};
      if (!c.ref) describe_children(c, sentences);
      sec.explanations.push_back(join_sentences(sentences));
    }
    doc.sections.push_back(std::move(sec));
  }
  return doc;
}

std::string ReportDocument::markdown() const {
  std::ostringstream os;
  os << "# Soft skill report: " << student << ", task " << task << "\n";
  if (!group.empty()) os << "\nGroup: " << group << "\n";
  for (const auto& s : sections) {
    os << "\n## " << s.skill << ": " << s.label << "\n\n" << s.summary << "\n";
    os << "\n### Strengths\n\n" << bullet_list(s.strengths, "No component stands out as high.");
    os << "\n### Improvement areas\n\n"
       << bullet_list(s.improvements, "No component stands out as low.");
    if (!s.explanations.empty()) {
      os << "\n### Details\n";
      for (const auto& e : s.explanations) os << "\n" << e << "\n";
    }
  }
  return os.str();
}

const std::vector<std::string>& default_jargon_blocklist() {
  static const std::vector<std::string> words{
      "validity",  "membership", "fuzzy",      "fuzzification", "defuzzification",
      "centroid",  "antecedent", "consequent", "rule base",     "t-norm",
      "glmp",      "perception mapping",       "computational perception",
      "algorithm", "epsilon",    "normalized", "aggregation"};
  return words;
}

std::vector<std::string> find_jargon(std::string_view text,
                                     const std::vector<std::string>& blocklist) {
  const std::string hay = lower(text);
  std::vector<std::string> found;
  for (const auto& term : blocklist) {
    const std::string needle = lower(term);
    if (needle.empty()) continue;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos;
         pos = hay.find(needle, pos + 1)) {
      const bool left_ok = pos == 0 || !is_word_char(hay[pos - 1]);
      const std::size_t end = pos + needle.size();
      const bool right_ok = end >= hay.size() || !is_word_char(hay[end]);
      if (left_ok && right_ok) {
        found.push_back(term);
        break;
      }
    }
  }
  return found;
}

std::string_view default_prompt_template() {
  return "Write a short feedback report for student {student} on task {task}.\n"
         "Use plain, encouraging language and avoid technical terms.\n"
         "Use only the components and labels that appear in the pre-report below; do not\n"
         "introduce new ones. Start with the overall level of each skill, then highlight the\n"
         "strongest and weakest areas at the most detailed level available. When several\n"
         "components share a label, mention them together instead of repeating the label.\n"
         "\n"
         "High-performing areas:\n"
         "{strengths}\n"
         "Areas to improve:\n"
         "{improvements}\n"
         "Pre-report (JSON):\n"
         "{prereport}";
}

PromptPackage emit_prompt_package(const PreReport& pre, std::string_view prompt_template,
                                  std::string template_id) {
  std::vector<std::string> strengths, improvements;
  for (const auto& skill : pre.skills) {
    std::vector<std::string> s, i;
    collect_extremes(skill, s, i);
    for (auto& x : s) strengths.push_back(skill.component + ": " + x);
    for (auto& x : i) improvements.push_back(skill.component + ": " + x);
  }
  const std::string strengths_text =
      bullet_list(strengths, "There are no high-performing areas in this pre-report.");
  const std::string improvements_text =
      bullet_list(improvements, "There are no areas flagged for improvement in this pre-report.");
  const std::string json = prereport_to_json(pre);

  PromptPackage pkg;
  pkg.template_id = std::move(template_id);
  std::string& out = pkg.text;
  out = "template: " + pkg.template_id + "\n\n";
  for (std::size_t i = 0; i < prompt_template.size(); ++i) {
    if (prompt_template[i] == '{') {
      const std::size_t close = prompt_template.find('}', i);
      if (close != std::string_view::npos) {
        const std::string_view name = prompt_template.substr(i + 1, close - i - 1);
        const std::string* value = nullptr;
        if (name == "student") value = &pre.student;
        else if (name == "task") value = &pre.task;
        else if (name == "strengths") value = &strengths_text;
        else if (name == "improvements") value = &improvements_text;
        else if (name == "prereport") value = &json;
        if (value) {
          out += *value;
          i = close;
          continue;
        }
      }
    }
    out.push_back(prompt_template[i]);
  }
  if (out.back() != '\n') out.push_back('\n');
  return pkg;
}

}  // namespace glmp
