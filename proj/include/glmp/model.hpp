#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "glmp/diagnostics.hpp"
#include "glmp/fuzzy.hpp"

namespace glmp {

enum class Source { Text, Audio, Video };

/// Hierarchy level of a perception mapping. The numeric value is the PM order.
enum class Level { Measure = 1, Attribute = 2, Dimension = 3, Skill = 4 };

enum class Aggregation { Fuzzify, RuleBase, WeightedAverage };

std::string_view to_string(Source s);
std::string_view to_string(Level l);
std::string_view to_string(Aggregation a);
std::optional<Source> parse_source(std::string_view s);
std::optional<Level> parse_level(std::string_view s);

/// Raw measure definition: unit, normalization bounds and modality.
struct MeasureSpec {
  std::string name;
  std::string unit;
  double lo = 0.0;
  double hi = 1.0;
  bool invert = false;
  /// Bounds are fitted on the cohort (5th-95th percentile) at load time.
  bool cohort_range = false;
  Source source = Source::Text;
  SourceSpan span;

  bool degenerate() const noexcept { return !(lo < hi); }
};

bool operator==(const MeasureSpec& a, const MeasureSpec& b);

/// Perception mapping (U, y, g, T). Measure-level PMs fuzzify the measure of
/// the same name; higher levels aggregate CPs produced by other PMs.
struct PerceptionMapping {
  std::string name;
  Level level = Level::Attribute;
  /// Keys (see name_key) of the input CPs, or of the measure for order 1.
  std::vector<std::string> inputs;
  /// Key of the output linguistic variable.
  std::string output;
  Aggregation aggregation = Aggregation::RuleBase;
  std::vector<FuzzyRule> rules;
  std::vector<SourceSpan> rule_spans;
  std::vector<double> weights;
  std::optional<std::string> text_template;
  SourceSpan span;

  int order() const noexcept { return static_cast<int>(level); }
};

bool operator==(const PerceptionMapping& a, const PerceptionMapping& b);

struct VariableDecl {
  VariablePtr variable;
  /// False for the implicit built-in `level` variable.
  bool declared = true;
  SourceSpan span;
};

inline constexpr std::string_view kDefaultVariable = "level";

/// Default template used when a PM declares none.
inline constexpr std::string_view kDefaultTemplate = "{component} is {label}.";

/// A network of perception mappings realizing one or more skills. Plain data;
/// call reindex() after editing the vectors by hand.
struct GlmpModel {
  std::vector<VariableDecl> variables;
  std::vector<MeasureSpec> measures;
  std::vector<PerceptionMapping> pms;

  /// Model with only the built-in `level` variable.
  static GlmpModel empty();

  void reindex();

  const PerceptionMapping* find_pm(std::string_view name) const;
  std::optional<std::size_t> pm_index(std::string_view name) const;
  const MeasureSpec* find_measure(std::string_view name) const;
  VariablePtr find_variable(std::string_view name) const;
  /// Output variable of the PM.
  VariablePtr output_of(const PerceptionMapping& pm) const;

  /// Indices of skill-level PMs in declaration order.
  std::vector<std::size_t> skills() const;
  /// Evaluation order: by level, then declaration order. Valid for any
  /// model that passes validation since inputs come from lower levels.
  std::vector<std::size_t> topological_order() const;

  std::string_view effective_template(const PerceptionMapping& pm) const {
    return pm.text_template ? std::string_view(*pm.text_template) : kDefaultTemplate;
  }

  friend bool operator==(const GlmpModel& a, const GlmpModel& b);

 private:
  std::unordered_map<std::string, std::size_t> pm_by_key_;
  std::unordered_map<std::string, std::size_t> measure_by_key_;
  std::unordered_map<std::string, std::size_t> variable_by_key_;
};

}  // namespace glmp
