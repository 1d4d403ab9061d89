#include <algorithm>
#include <cmath>
#include <set>

#include "glmp/dsl.hpp"
#include "glmp/names.hpp"
#include "glmp/text_template.hpp"

namespace glmp {

RuleCoverage check_rule_coverage(const std::vector<FuzzyRule>& rules,
                                 const std::vector<std::size_t>& label_counts) {
  RuleCoverage cov;
  std::size_t total = 1;
  for (std::size_t c : label_counts) total *= c;
  const std::size_t n = label_counts.size();

  const auto combo_at = [&](std::size_t index) {
    std::vector<std::size_t> combo(n);
    for (std::size_t k = n; k-- > 0;) {
      combo[k] = index % label_counts[k];
      index /= label_counts[k];
    }
    return combo;
  };

  std::vector<std::ptrdiff_t> consequent(total, -1);
  std::vector<bool> conflict(total, false);
  std::set<std::pair<std::vector<std::pair<std::size_t, std::size_t>>, std::size_t>> seen;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    auto ante = rules[r].antecedents;
    std::sort(ante.begin(), ante.end());
    if (!seen.emplace(ante, rules[r].consequent).second) {
      cov.duplicates.push_back(r);
      continue;
    }
    // Constrained inputs are fixed; the rest range over all labels.
    std::vector<std::ptrdiff_t> fixed(n, -1);
    bool valid = true;
    for (auto [i, l] : ante) {
      if (i >= n || l >= label_counts[i]) {
        valid = false;
        break;
      }
      fixed[i] = static_cast<std::ptrdiff_t>(l);
    }
    if (!valid) continue;
    std::vector<std::size_t> free_dims;
    std::size_t base = 0;
    for (std::size_t k = 0; k < n; ++k) {
      base *= label_counts[k];
      if (fixed[k] >= 0) base += static_cast<std::size_t>(fixed[k]);
      else free_dims.push_back(k);
    }
    std::vector<std::size_t> stride(n, 1);
    for (std::size_t k = n; k-- > 1;) stride[k - 1] = stride[k] * label_counts[k];
    std::size_t span = 1;
    for (std::size_t k : free_dims) span *= label_counts[k];
    for (std::size_t s = 0; s < span; ++s) {
      std::size_t idx = base;
      std::size_t rest = s;
      for (std::size_t k : free_dims) {
        idx += (rest % label_counts[k]) * stride[k];
        rest /= label_counts[k];
      }
      const auto c = static_cast<std::ptrdiff_t>(rules[r].consequent);
      if (consequent[idx] < 0) consequent[idx] = c;
      else if (consequent[idx] != c) conflict[idx] = true;
    }
  }
  for (std::size_t i = 0; i < total; ++i) {
    if (consequent[i] < 0) cov.missing.push_back(combo_at(i));
    if (conflict[i]) cov.conflicting.push_back(combo_at(i));
  }
  return cov;
}

namespace {

class Validator {
 public:
  explicit Validator(const GlmpModel& m) : m_(m) {}

  Diagnostics run() {
    if (m_.skills().empty()) {
      add(Severity::Error, diag::kNoSkill, {1, 1, 0, 0}, "no skill defined");
    }
    for (const auto& spec : m_.measures) check_measure(spec);
    for (std::size_t i = 0; i < m_.pms.size(); ++i) check_pm(m_.pms[i]);
    check_cycles();
    check_usage();
    sort_by_position(out_);
    return std::move(out_);
  }

 private:
  const GlmpModel& m_;
  Diagnostics out_;

  void add(Severity sev, std::string_view code, SourceSpan span, std::string msg) {
    out_.push_back({sev, std::string(code), std::move(msg), span});
  }

  void check_measure(const MeasureSpec& spec) {
    if (spec.cohort_range) return;
    if (!std::isfinite(spec.lo) || !std::isfinite(spec.hi) || spec.lo > spec.hi) {
      add(Severity::Error, diag::kRange, spec.span,
          "range of '" + spec.name + "' must satisfy lo <= hi");
    } else if (spec.lo == spec.hi) {
      add(Severity::Warning, diag::kDegenerateRange, spec.span,
          "range of '" + spec.name + "' is empty; its values normalize to 0.5");
    }
  }

  std::string combo_text(const PerceptionMapping& pm, const std::vector<std::size_t>& combo) {
    std::string s = "(";
    for (std::size_t k = 0; k < combo.size(); ++k) {
      if (k) s += ", ";
      const PerceptionMapping* in = m_.find_pm(pm.inputs[k]);
      s += (in ? in->name : pm.inputs[k]) + " is " +
           (in && m_.output_of(*in) ? m_.output_of(*in)->labels()[combo[k]]
                                    : std::to_string(combo[k]));
    }
    return s + ")";
  }

  void check_pm(const PerceptionMapping& pm) {
    const VariablePtr out = m_.output_of(pm);
    if (!out) {
      add(Severity::Error, diag::kUnknownIdentifier, pm.span,
          "unknown output variable '" + pm.output + "' for '" + pm.name + "'");
      return;
    }
    check_template(pm);

    if (pm.level == Level::Measure) {
      if (pm.aggregation != Aggregation::Fuzzify || pm.inputs.size() != 1 ||
          !m_.find_measure(pm.inputs.front())) {
        add(Severity::Error, diag::kArity, pm.span,
            "measure '" + pm.name + "' must fuzzify exactly one numeric input");
      }
      return;
    }
    if (pm.inputs.empty()) {
      add(Severity::Error, diag::kArity, pm.span, "'" + pm.name + "' has no inputs");
      return;
    }
    std::vector<std::size_t> label_counts;
    bool inputs_ok = true;
    for (const auto& key : pm.inputs) {
      const PerceptionMapping* in = m_.find_pm(key);
      if (!in) {
        add(Severity::Error, diag::kUnknownIdentifier, pm.span,
            "unknown input '" + key + "' of '" + pm.name + "'");
        inputs_ok = false;
        continue;
      }
      if (in->order() >= pm.order()) {
        add(Severity::Error, diag::kOrder, pm.span,
            std::string(to_string(pm.level)) + " '" + pm.name + "' takes input '" + in->name +
                "' from the same or a higher level (" + std::string(to_string(in->level)) +
                "); inputs must come from lower levels");
      }
      const VariablePtr var = m_.output_of(*in);
      label_counts.push_back(var ? var->size() : 0);
      if (!var) inputs_ok = false;
    }

    switch (pm.aggregation) {
      case Aggregation::Fuzzify:
        add(Severity::Error, diag::kArity, pm.span,
            "'" + pm.name + "' aggregates CPs and cannot fuzzify a numeric input");
        break;
      case Aggregation::RuleBase:
        if (pm.inputs.size() > 3) {
          add(Severity::Error, diag::kArity, pm.span,
              "'" + pm.name + "' has " + std::to_string(pm.inputs.size()) +
                  " inputs; fuzzy rules aggregate up to three inputs, use weights instead");
        } else if (inputs_ok) {
          check_rules(pm, *out, label_counts);
        }
        break;
      case Aggregation::WeightedAverage:
        if (pm.inputs.size() <= 3) {
          add(Severity::Error, diag::kArity, pm.span,
              "'" + pm.name + "' has " + std::to_string(pm.inputs.size()) +
                  " inputs; weighted averages are used for more than three inputs, use rules instead");
        }
        check_weights(pm, *out, label_counts);
        break;
    }
  }

  void check_rules(const PerceptionMapping& pm, const LinguisticVariable& out,
                   const std::vector<std::size_t>& label_counts) {
    const auto span_of = [&](std::size_t r) {
      return r < pm.rule_spans.size() ? pm.rule_spans[r] : pm.span;
    };
    for (std::size_t r = 0; r < pm.rules.size(); ++r) {
      if (pm.rules[r].consequent >= out.size()) {
        add(Severity::Error, diag::kUnknownLabel, span_of(r), "rule consequent out of range");
        return;
      }
    }
    const RuleCoverage cov = check_rule_coverage(pm.rules, label_counts);
    for (std::size_t r : cov.duplicates) {
      add(Severity::Warning, diag::kRuleDuplicate, span_of(r),
          "duplicate rule in '" + pm.name + "'");
    }
    const auto list = [&](const std::vector<std::vector<std::size_t>>& combos) {
      std::string s;
      const std::size_t shown = std::min<std::size_t>(combos.size(), 30);
      for (std::size_t i = 0; i < shown; ++i) {
        if (i) s += ", ";
        s += combo_text(pm, combos[i]);
      }
      if (combos.size() > shown) s += ", ...";
      return s;
    };
    if (!cov.missing.empty()) {
      add(Severity::Error, diag::kRuleHole, pm.span,
          "rule base of '" + pm.name + "' misses " + std::to_string(cov.missing.size()) +
              " combination(s): " + list(cov.missing));
    }
    if (!cov.conflicting.empty()) {
      add(Severity::Error, diag::kRuleConflict, pm.span,
          "rule base of '" + pm.name + "' gives different conclusions for " +
              list(cov.conflicting));
    }
  }

  void check_weights(const PerceptionMapping& pm, const LinguisticVariable& out,
                     const std::vector<std::size_t>& label_counts) {
    if (pm.weights.size() != pm.inputs.size()) {
      add(Severity::Error, diag::kWeights, pm.span,
          "'" + pm.name + "' needs one weight per input (" + std::to_string(pm.inputs.size()) +
              "), got " + std::to_string(pm.weights.size()));
      return;
    }
    double total = 0.0;
    for (double w : pm.weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        add(Severity::Error, diag::kWeights, pm.span, "weights of '" + pm.name + "' must be non-negative");
        return;
      }
      total += w;
    }
    if (!(total > 0.0)) {
      add(Severity::Error, diag::kWeights, pm.span, "weights of '" + pm.name + "' are all zero");
    }
    for (std::size_t c : label_counts) {
      if (c != 0 && c != out.size()) {
        add(Severity::Error, diag::kArity, pm.span,
            "weighted inputs of '" + pm.name + "' must have as many labels as its output");
        return;
      }
    }
  }

  void check_template(const PerceptionMapping& pm) {
    if (!pm.text_template) return;
    const ParsedTemplate t = parse_template(*pm.text_template);
    if (t.error) {
      add(Severity::Error, diag::kTemplate, pm.span, "template of '" + pm.name + "': " + *t.error);
      return;
    }
    for (const auto& part : t.parts) {
      if (part.kind != TemplatePart::Kind::Child) continue;
      const std::string key = name_key(part.text);
      const bool is_input = pm.level != Level::Measure &&
                            std::find(pm.inputs.begin(), pm.inputs.end(), key) != pm.inputs.end();
      if (!is_input) {
        add(Severity::Error, diag::kTemplate, pm.span,
            "template of '" + pm.name + "' refers to '" + part.text + "', which is not one of its inputs");
      }
    }
  }

  // Iterative DFS over PM -> input edges; reports each cycle once.
  void check_cycles() {
    const std::size_t n = m_.pms.size();
    std::vector<int> color(n, 0);  // 0 white, 1 on stack, 2 done
    std::vector<bool> reported(n, false);
    const auto edges = [&](std::size_t v) {
      std::vector<std::size_t> out;
      if (m_.pms[v].level == Level::Measure) return out;
      for (const auto& key : m_.pms[v].inputs) {
        if (auto i = m_.pm_index(key)) out.push_back(*i);
      }
      return out;
    };
    for (std::size_t root = 0; root < n; ++root) {
      if (color[root]) continue;
      std::vector<std::pair<std::size_t, std::vector<std::size_t>>> stack;
      std::vector<std::size_t> next_child;
      stack.emplace_back(root, edges(root));
      next_child.push_back(0);
      color[root] = 1;
      while (!stack.empty()) {
        auto& [v, children] = stack.back();
        std::size_t& k = next_child.back();
        if (k == children.size()) {
          color[v] = 2;
          stack.pop_back();
          next_child.pop_back();
          continue;
        }
        const std::size_t w = children[k++];
        if (color[w] == 1) {
          std::vector<std::size_t> cycle;
          std::size_t start = stack.size();
          while (start > 0 && stack[start - 1].first != w) --start;
          for (std::size_t s = start - 1; s < stack.size(); ++s) cycle.push_back(stack[s].first);
          if (std::none_of(cycle.begin(), cycle.end(), [&](std::size_t c) { return reported[c]; })) {
            const std::size_t first = *std::min_element(cycle.begin(), cycle.end());
            std::string path;
            for (std::size_t c : cycle) {
              path += "'" + m_.pms[c].name + "' -> ";
              reported[c] = true;
            }
            path += "'" + m_.pms[w].name + "'";
            add(Severity::Error, diag::kCycle, m_.pms[first].span,
                cycle.size() == 1 ? "cycle detected: '" + m_.pms[w].name + "' depends on itself"
                                  : "cycle detected: " + path);
          }
        } else if (color[w] == 0) {
          color[w] = 1;
          stack.emplace_back(w, edges(w));
          next_child.push_back(0);
        }
      }
    }
  }

  void check_usage() {
    std::vector<bool> used(m_.pms.size(), false);
    for (const auto& pm : m_.pms) {
      if (pm.level == Level::Measure) continue;
      for (const auto& key : pm.inputs) {
        if (auto i = m_.pm_index(key)) used[*i] = true;
      }
    }
    for (std::size_t i = 0; i < m_.pms.size(); ++i) {
      if (m_.pms[i].level != Level::Skill && !used[i]) {
        add(Severity::Error, diag::kUnused, m_.pms[i].span,
            std::string(to_string(m_.pms[i].level)) + " '" + m_.pms[i].name +
                "' is not used by any other component");
      }
    }
  }
};

}  // namespace

Diagnostics validate_model(const GlmpModel& model) { return Validator(model).run(); }

}  // namespace glmp
