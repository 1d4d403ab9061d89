#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace glmp {

/// Raised when a scalar lies outside the domain an operation accepts.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a model or its aggregation parameters cannot be evaluated.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Validity and relevance vectors, one entry per label.
using LabelVector = Eigen::VectorXd;

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kDefaultTieEpsilon = 0.1;
inline constexpr std::size_t kMaxLabels = 9;

/// Triangular membership over [0,1]. Degree is 1 at `peak`, 0 outside
/// [left, right] and linear in between; left == peak or peak == right give
/// shoulders.
struct MembershipFunction {
  double left = 0.0;
  double peak = 0.0;
  double right = 0.0;

  double degree(double z) const noexcept;
  bool valid() const noexcept;

  friend bool operator==(const MembershipFunction&, const MembershipFunction&) = default;
};

/// Uniform triangular partition of [0,1] with `n` labels (peaks at i/(n-1)).
std::vector<MembershipFunction> uniform_partition(std::size_t n);

/// Checks that the functions sum to one at every point of [0,1]. The sum of
/// piecewise-linear functions is piecewise linear, so it suffices to check
/// every breakpoint and the midpoints between consecutive breakpoints.
bool is_ruspini_partition(const std::vector<MembershipFunction>& fns, double tol = kNormTolerance);

/// A named concept with an ordered label set (weakest first).
class LinguisticVariable {
 public:
  LinguisticVariable() = default;
  LinguisticVariable(std::string name, std::vector<std::string> labels);
  LinguisticVariable(std::string name, std::vector<std::string> labels,
                     std::vector<MembershipFunction> partition, LabelVector relevance);

  /// Low / Medium / High with the uniform partition.
  static LinguisticVariable default_level(std::string name = "level");

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<MembershipFunction>& partition() const noexcept { return partition_; }
  const LabelVector& relevance() const noexcept { return relevance_; }
  std::size_t size() const noexcept { return labels_.size(); }

  /// Upper-cased first character of the label ("Low" -> "L").
  std::string abbreviation(std::size_t label) const;
  std::optional<std::size_t> find_label(std::string_view label) const;
  /// Centroid used to collapse a CP to a scalar: evenly spaced i/(n-1).
  double centroid(std::size_t label) const noexcept;

  bool has_default_partition() const;
  bool has_default_relevance() const;

  friend bool operator==(const LinguisticVariable& a, const LinguisticVariable& b);

 private:
  std::string name_;
  std::vector<std::string> labels_;
  std::vector<MembershipFunction> partition_;
  LabelVector relevance_;
};

using VariablePtr = std::shared_ptr<const LinguisticVariable>;

/// Computational perception: labels (through the variable), validity degrees
/// summing to one, and per-label relevance.
struct ComputationalPerception {
  VariablePtr variable;
  LabelVector validity;
  LabelVector relevance;

  std::size_t size() const noexcept { return static_cast<std::size_t>(validity.size()); }
  bool normalized(double tol = kNormTolerance) const noexcept;
};

/// One-hot CP on `label`.
ComputationalPerception crisp(const VariablePtr& variable, std::size_t label);

/// Rule over up to three inputs. Inputs without an antecedent are
/// unconstrained.
struct FuzzyRule {
  std::vector<std::pair<std::size_t, std::size_t>> antecedents;  // (input index, label index)
  std::size_t consequent = 0;

  friend bool operator==(const FuzzyRule&, const FuzzyRule&) = default;
};

/// Rendered outcome on the five-bin scale (L, L/M, M, M/H, H for three labels).
struct LabelOutcome {
  std::size_t primary = 0;
  std::optional<std::size_t> secondary;
  std::string rendered;
  LabelVector validity;

  /// Position on the half-step scale: 2*primary, or primary+secondary for a
  /// combined label. L=0, L/M=1, M=2, M/H=3, H=4 for three labels.
  std::size_t half_step() const noexcept {
    return secondary ? primary + *secondary : 2 * primary;
  }
};

ComputationalPerception fuzzify(double z_norm, const VariablePtr& variable,
                                std::string_view measure = {});

ComputationalPerception evaluate_rules(const std::vector<ComputationalPerception>& inputs,
                                       const std::vector<FuzzyRule>& rules,
                                       const VariablePtr& out_var);

/// Collapses each input to s = sum(w_i * c_i), averages with `weights`, and
/// refuzzifies. Scaling every weight by the same positive constant leaves the
/// result unchanged bit-for-bit.
ComputationalPerception evaluate_weighted(const std::vector<ComputationalPerception>& inputs,
                                          const std::vector<double>& weights,
                                          const VariablePtr& out_var);

/// Scalar score of a CP over evenly spaced centroids.
double collapse(const ComputationalPerception& cp);

LabelOutcome select_label(const ComputationalPerception& cp,
                          double tie_epsilon = kDefaultTieEpsilon);

/// Full label text, e.g. "Medium/High".
std::string label_text(const LinguisticVariable& var, const LabelOutcome& outcome);

}  // namespace glmp
