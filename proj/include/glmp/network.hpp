#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "glmp/fuzzy.hpp"
#include "glmp/ingest.hpp"
#include "glmp/model.hpp"

namespace glmp {

/// Raised when a bundle cannot be evaluated (missing or non-finite measure).
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Record of one PM evaluation.
struct PmStep {
  std::size_t pm = 0;  // index into model.pms
  /// Raw and normalized measure value; set for measure-level PMs only.
  std::optional<double> raw;
  std::optional<double> normalized;
  std::vector<ComputationalPerception> inputs;
  ComputationalPerception output;
  LabelOutcome outcome;
};

struct EvaluationTrace {
  std::shared_ptr<const GlmpModel> model;
  std::string student;
  std::string task;
  std::string group;
  double tie_epsilon = kDefaultTieEpsilon;
  /// Steps in evaluation order.
  std::vector<PmStep> steps;
  /// steps index for each model PM.
  std::vector<std::size_t> step_of_pm;
  std::vector<std::string> warnings;

  const PmStep& step(std::size_t pm) const { return steps.at(step_of_pm.at(pm)); }
};

/// Evaluates every PM of a validated model in topological order. The result
/// depends only on the arguments.
EvaluationTrace evaluate_network(std::shared_ptr<const GlmpModel> model,
                                 const MeasureBundle& bundle,
                                 double tie_epsilon = kDefaultTieEpsilon);

}  // namespace glmp
