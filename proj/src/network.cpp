#include "glmp/network.hpp"

#include <cmath>
#include <limits>

namespace glmp {

EvaluationTrace evaluate_network(std::shared_ptr<const GlmpModel> model,
                                 const MeasureBundle& bundle, double tie_epsilon) {
  const GlmpModel& m = *model;
  EvaluationTrace trace;
  trace.model = model;
  trace.student = bundle.student;
  trace.task = bundle.task;
  trace.group = bundle.group();
  trace.tie_epsilon = tie_epsilon;
  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  trace.step_of_pm.assign(m.pms.size(), kUnset);

  const auto where = [&](const std::string& measure) {
    return "student '" + bundle.student + "', task '" + bundle.task + "', measure '" + measure + "'";
  };

  for (std::size_t idx : m.topological_order()) {
    const PerceptionMapping& pm = m.pms[idx];
    const VariablePtr out_var = m.output_of(pm);
    if (!out_var) throw ModelError("perception mapping '" + pm.name + "' has no output variable");
    PmStep step;
    step.pm = idx;
    switch (pm.aggregation) {
      case Aggregation::Fuzzify: {
        const MeasureSpec* spec = m.find_measure(pm.name);
        if (!spec) throw ModelError("no measure definition for '" + pm.name + "'");
        const auto raw = bundle.value(spec->name);
        if (!raw) throw EvaluationError("missing value: " + where(spec->name));
        if (!std::isfinite(*raw)) throw EvaluationError("non-finite value: " + where(spec->name));
        if (spec->degenerate()) {
          trace.warnings.push_back("measure '" + spec->name +
                                   "' has equal normalization bounds; using 0.5");
        }
        step.raw = *raw;
        step.normalized = normalize(*raw, *spec);
        step.output = fuzzify(*step.normalized, out_var, spec->name);
        break;
      }
      case Aggregation::RuleBase:
      case Aggregation::WeightedAverage: {
        for (const auto& key : pm.inputs) {
          const auto in = m.pm_index(key);
          if (!in || trace.step_of_pm[*in] == kUnset) {
            throw ModelError("input '" + key + "' of '" + pm.name + "' is not evaluated before it");
          }
          step.inputs.push_back(trace.steps[trace.step_of_pm[*in]].output);
        }
        step.output = pm.aggregation == Aggregation::RuleBase
                          ? evaluate_rules(step.inputs, pm.rules, out_var)
                          : evaluate_weighted(step.inputs, pm.weights, out_var);
        break;
      }
    }
    step.outcome = select_label(step.output, tie_epsilon);
    trace.step_of_pm[idx] = trace.steps.size();
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

}  // namespace glmp
