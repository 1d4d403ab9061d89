#include "glmp/model.hpp"

#include <algorithm>
#include <numeric>

#include "glmp/names.hpp"

namespace glmp {

std::string_view to_string(Source s) {
  switch (s) {
    case Source::Text: return "text";
    case Source::Audio: return "audio";
    case Source::Video: return "video";
  }
  return "text";
}

std::string_view to_string(Level l) {
  switch (l) {
    case Level::Measure: return "measure";
    case Level::Attribute: return "attribute";
    case Level::Dimension: return "dimension";
    case Level::Skill: return "skill";
  }
  return "measure";
}

std::string_view to_string(Aggregation a) {
  switch (a) {
    case Aggregation::Fuzzify: return "fuzzify";
    case Aggregation::RuleBase: return "rules";
    case Aggregation::WeightedAverage: return "weights";
  }
  return "fuzzify";
}

std::optional<Source> parse_source(std::string_view s) {
  const std::string k = name_key(s);
  if (k == "text") return Source::Text;
  if (k == "audio") return Source::Audio;
  if (k == "video") return Source::Video;
  return std::nullopt;
}

std::optional<Level> parse_level(std::string_view s) {
  const std::string k = name_key(s);
  if (k == "measure") return Level::Measure;
  if (k == "attribute") return Level::Attribute;
  if (k == "dimension") return Level::Dimension;
  if (k == "skill") return Level::Skill;
  return std::nullopt;
}

bool operator==(const MeasureSpec& a, const MeasureSpec& b) {
  return a.name == b.name && a.unit == b.unit && a.lo == b.lo && a.hi == b.hi &&
         a.invert == b.invert && a.cohort_range == b.cohort_range && a.source == b.source;
}

bool operator==(const PerceptionMapping& a, const PerceptionMapping& b) {
  return a.name == b.name && a.level == b.level && a.inputs == b.inputs &&
         a.output == b.output && a.aggregation == b.aggregation && a.rules == b.rules &&
         a.weights == b.weights && a.text_template == b.text_template;
}

GlmpModel GlmpModel::empty() {
  GlmpModel m;
  m.variables.push_back(
      {std::make_shared<const LinguisticVariable>(LinguisticVariable::default_level()), false, {}});
  m.reindex();
  return m;
}

void GlmpModel::reindex() {
  pm_by_key_.clear();
  measure_by_key_.clear();
  variable_by_key_.clear();
  for (std::size_t i = 0; i < pms.size(); ++i) pm_by_key_.emplace(name_key(pms[i].name), i);
  for (std::size_t i = 0; i < measures.size(); ++i) {
    measure_by_key_.emplace(name_key(measures[i].name), i);
  }
  for (std::size_t i = 0; i < variables.size(); ++i) {
    variable_by_key_.emplace(name_key(variables[i].variable->name()), i);
  }
}

const PerceptionMapping* GlmpModel::find_pm(std::string_view name) const {
  auto i = pm_index(name);
  return i ? &pms[*i] : nullptr;
}

std::optional<std::size_t> GlmpModel::pm_index(std::string_view name) const {
  auto it = pm_by_key_.find(name_key(name));
  if (it == pm_by_key_.end()) return std::nullopt;
  return it->second;
}

const MeasureSpec* GlmpModel::find_measure(std::string_view name) const {
  auto it = measure_by_key_.find(name_key(name));
  return it == measure_by_key_.end() ? nullptr : &measures[it->second];
}

VariablePtr GlmpModel::find_variable(std::string_view name) const {
  auto it = variable_by_key_.find(name_key(name));
  return it == variable_by_key_.end() ? nullptr : variables[it->second].variable;
}

VariablePtr GlmpModel::output_of(const PerceptionMapping& pm) const {
  return find_variable(pm.output);
}

std::vector<std::size_t> GlmpModel::skills() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pms.size(); ++i) {
    if (pms[i].level == Level::Skill) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> GlmpModel::topological_order() const {
  std::vector<std::size_t> order(pms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pms[a].order() < pms[b].order();
  });
  return order;
}

bool operator==(const GlmpModel& a, const GlmpModel& b) {
  if (a.variables.size() != b.variables.size()) return false;
  for (std::size_t i = 0; i < a.variables.size(); ++i) {
    if (a.variables[i].declared != b.variables[i].declared ||
        !(*a.variables[i].variable == *b.variables[i].variable)) {
      return false;
    }
  }
  return a.measures == b.measures && a.pms == b.pms;
}

}  // namespace glmp
