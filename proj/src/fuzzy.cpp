#include "glmp/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "glmp/names.hpp"

namespace glmp {

double MembershipFunction::degree(double z) const noexcept {
  if (z < left || z > right) return 0.0;
  if (z == peak) return 1.0;
  if (z < peak) return (z - left) / (peak - left);
  return (right - z) / (right - peak);
}

bool MembershipFunction::valid() const noexcept {
  const auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  return in_unit(left) && in_unit(peak) && in_unit(right) && left <= peak && peak <= right;
}

std::vector<MembershipFunction> uniform_partition(std::size_t n) {
  std::vector<MembershipFunction> out;
  if (n < 2) return out;
  const double step = 1.0 / static_cast<double>(n - 1);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i == 0 ? 0.0 : static_cast<double>(i - 1) * step;
    const double peak = i + 1 == n ? 1.0 : static_cast<double>(i) * step;
    const double right = i + 2 >= n ? 1.0 : static_cast<double>(i + 1) * step;
    out.push_back({left, peak, right});
  }
  return out;
}

bool is_ruspini_partition(const std::vector<MembershipFunction>& fns, double tol) {
  if (fns.empty()) return false;
  std::vector<double> points{0.0, 1.0};
  for (const auto& f : fns) {
    if (!f.valid()) return false;
    points.insert(points.end(), {f.left, f.peak, f.right});
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const std::size_t n = points.size();
  for (std::size_t i = 0; i + 1 < n; ++i) points.push_back(0.5 * (points[i] + points[i + 1]));
  for (double z : points) {
    double sum = 0.0;
    for (const auto& f : fns) sum += f.degree(z);
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

LinguisticVariable::LinguisticVariable(std::string name, std::vector<std::string> labels)
    : LinguisticVariable(std::move(name), labels, uniform_partition(labels.size()),
                         LabelVector::Ones(static_cast<Eigen::Index>(labels.size()))) {}

LinguisticVariable::LinguisticVariable(std::string name, std::vector<std::string> labels,
                                       std::vector<MembershipFunction> partition,
                                       LabelVector relevance)
    : name_(std::move(name)),
      labels_(std::move(labels)),
      partition_(std::move(partition)),
      relevance_(std::move(relevance)) {
  if (labels_.size() < 2 || labels_.size() > kMaxLabels) {
    throw ModelError("variable '" + name_ + "' must have between 2 and " +
                     std::to_string(kMaxLabels) + " labels");
  }
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(name_key(l)).second) {
      throw ModelError("variable '" + name_ + "' repeats label '" + l + "'");
    }
  }
  // Rendered outcomes use initials, so they must tell labels apart.
  std::set<std::string> initials;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!initials.insert(abbreviation(i)).second) {
      throw ModelError("variable '" + name_ + "': labels '" + labels_[i] +
                       "' and another label share the initial " + abbreviation(i));
    }
  }
  if (partition_.size() != labels_.size()) {
    throw ModelError("variable '" + name_ + "' needs one membership function per label");
  }
  if (!is_ruspini_partition(partition_)) {
    throw ModelError("variable '" + name_ + "' partition does not sum to 1 over [0,1]");
  }
  if (static_cast<std::size_t>(relevance_.size()) != labels_.size() ||
      !(relevance_.array() >= 0.0).all() || !relevance_.allFinite()) {
    throw ModelError("variable '" + name_ + "' needs one non-negative relevance per label");
  }
}

LinguisticVariable LinguisticVariable::default_level(std::string name) {
  return LinguisticVariable(std::move(name), {"Low", "Medium", "High"});
}

std::string LinguisticVariable::abbreviation(std::size_t label) const {
  const std::string& l = labels_.at(label);
  if (l.empty()) return "?";
  char c = l.front();
  if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  return std::string(1, c);
}

std::optional<std::size_t> LinguisticVariable::find_label(std::string_view label) const {
  const std::string key = name_key(label);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (name_key(labels_[i]) == key) return i;
  }
  return std::nullopt;
}

double LinguisticVariable::centroid(std::size_t label) const noexcept {
  return static_cast<double>(label) / static_cast<double>(labels_.size() - 1);
}

bool LinguisticVariable::has_default_partition() const {
  return partition_ == uniform_partition(labels_.size());
}

bool LinguisticVariable::has_default_relevance() const {
  return (relevance_.array() == 1.0).all();
}

bool operator==(const LinguisticVariable& a, const LinguisticVariable& b) {
  return a.name_ == b.name_ && a.labels_ == b.labels_ && a.partition_ == b.partition_ &&
         a.relevance_.size() == b.relevance_.size() && a.relevance_ == b.relevance_;
}

bool ComputationalPerception::normalized(double tol) const noexcept {
  return validity.size() > 0 && std::abs(validity.sum() - 1.0) < tol &&
         (validity.array() >= 0.0).all();
}

ComputationalPerception crisp(const VariablePtr& variable, std::size_t label) {
  LabelVector w = LabelVector::Zero(static_cast<Eigen::Index>(variable->size()));
  w(static_cast<Eigen::Index>(label)) = 1.0;
  return {variable, std::move(w), variable->relevance()};
}

namespace {

LabelVector renormalized(LabelVector w, const char* what) {
  const double total = w.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw ModelError(std::string(what) + ": no label has positive validity");
  }
  return w / total;
}

// Quantizes to a 2^-32 grid so that round-off from rescaled weights cannot
// leak into the refuzzified result (barring a mean within an ulp or so of a
// grid midpoint).
double snap(long double x) {
  return static_cast<double>(std::ldexp(std::nearbyint(std::ldexp(x, 32)), -32));
}

}  // namespace

ComputationalPerception fuzzify(double z_norm, const VariablePtr& variable,
                                std::string_view measure) {
  if (!std::isfinite(z_norm) || z_norm < 0.0 || z_norm > 1.0) {
    std::ostringstream msg;
    msg << "normalized value " << z_norm << " for '"
        << (measure.empty() ? variable->name() : std::string(measure))
        << "' is outside [0, 1]";
    throw DomainError(msg.str());
  }
  const auto n = static_cast<Eigen::Index>(variable->size());
  LabelVector w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w(i) = variable->partition()[static_cast<std::size_t>(i)].degree(z_norm);
  }
  return {variable, renormalized(std::move(w), "fuzzify"), variable->relevance()};
}

ComputationalPerception evaluate_rules(const std::vector<ComputationalPerception>& inputs,
                                       const std::vector<FuzzyRule>& rules,
                                       const VariablePtr& out_var) {
  if (inputs.empty() || inputs.size() > 3) {
    throw ModelError("rule bases take between 1 and 3 inputs, got " +
                     std::to_string(inputs.size()));
  }
  LabelVector activation = LabelVector::Zero(static_cast<Eigen::Index>(out_var->size()));
  for (const auto& rule : rules) {
    if (rule.consequent >= out_var->size()) throw ModelError("rule consequent out of range");
    double firing = 1.0;
    for (auto [input, label] : rule.antecedents) {
      if (input >= inputs.size() || label >= inputs[input].size()) {
        throw ModelError("rule antecedent out of range");
      }
      firing = std::min(firing, inputs[input].validity(static_cast<Eigen::Index>(label)));
    }
    auto& slot = activation(static_cast<Eigen::Index>(rule.consequent));
    slot = std::max(slot, firing);
  }
  return {out_var, renormalized(std::move(activation), "rule base"), out_var->relevance()};
}

double collapse(const ComputationalPerception& cp) {
  double s = 0.0;
  for (std::size_t i = 0; i < cp.size(); ++i) {
    s += cp.validity(static_cast<Eigen::Index>(i)) * cp.variable->centroid(i);
  }
  return s;
}

ComputationalPerception evaluate_weighted(const std::vector<ComputationalPerception>& inputs,
                                          const std::vector<double>& weights,
                                          const VariablePtr& out_var) {
  if (inputs.empty() || inputs.size() != weights.size()) {
    throw ModelError("weighted average needs one weight per input");
  }
  long double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw ModelError("weights must be finite and non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw ModelError("weighted average with all-zero weights");
  long double scalar = 0.0;
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    if (inputs[j].size() != out_var->size()) {
      throw ModelError("weighted average inputs must share the output label cardinality");
    }
    scalar += weights[j] * static_cast<long double>(collapse(inputs[j]));
  }
  return fuzzify(std::clamp(snap(scalar / total), 0.0, 1.0), out_var);
}

LabelOutcome select_label(const ComputationalPerception& cp, double tie_epsilon) {
  LabelOutcome out;
  out.validity = cp.validity;
  const std::size_t n = cp.size();
  const auto w = [&](std::size_t i) { return cp.validity(static_cast<Eigen::Index>(i)); };
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (w(i) > w(best)) best = i;
  }
  std::optional<std::size_t> runner;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == best) continue;
    if (!runner || w(i) > w(*runner)) runner = i;
  }
  out.primary = best;
  const auto& var = *cp.variable;
  // kNormTolerance absorbs representation error such as 0.55 - 0.45 > 0.1.
  if (runner && (best > *runner ? best - *runner : *runner - best) == 1 &&
      w(best) - w(*runner) <= tie_epsilon + kNormTolerance) {
    out.secondary = runner;
    const std::size_t lo = std::min(best, *runner);
    out.rendered = var.abbreviation(lo) + "/" + var.abbreviation(lo + 1);
  } else {
    out.rendered = var.abbreviation(best);
  }
  return out;
}

std::string label_text(const LinguisticVariable& var, const LabelOutcome& outcome) {
  if (!outcome.secondary) return var.labels().at(outcome.primary);
  const std::size_t lo = std::min(outcome.primary, *outcome.secondary);
  return var.labels().at(lo) + "/" + var.labels().at(lo + 1);
}

}  // namespace glmp
