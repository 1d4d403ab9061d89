#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "glmp/network.hpp"

namespace glmp {

/// Raised when a correlation is not defined (constant series or fewer than
/// three pairs).
class UndefinedCorrelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for malformed analysis tables.
class TableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pearson product-moment coefficient. Requires equal lengths >= 3 and
/// non-constant series; symmetric in its arguments bit-for-bit.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Rendered label -> score. Scores must increase strictly in label order.
class LabelScoreMapping {
 public:
  /// L=1, L/M=2, M=3, M/H=4, H=5.
  LabelScoreMapping();
  explicit LabelScoreMapping(std::vector<std::pair<std::string, double>> entries);

  /// CSV with header `label,score`, rows in label order.
  static LabelScoreMapping from_csv(std::string_view text);

  std::optional<double> score(std::string_view label) const;
  const std::vector<std::pair<std::string, double>>& entries() const noexcept { return entries_; }

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

struct Rating {
  std::string group;
  std::string student;
  std::string task;
  double grade = 0.0;
  std::string source;
};

/// Instructor grades (0-100), unique per (group, student, task).
struct RatingsTable {
  std::vector<Rating> rows;

  /// CSV header `group,student,task,grade[,source]`. Throws TableError.
  static RatingsTable from_csv(std::string_view text);
  std::optional<double> grade(std::string_view group, std::string_view student,
                              std::string_view task) const;
};

struct LabelColumn {
  std::string skill;
  std::string task;
  std::string header() const { return skill + ":" + task; }
};

struct LabelRow {
  std::string group;
  std::string student;
  std::string source;
  /// One rendered label per column; empty when not evaluated.
  std::vector<std::string> cells;
};

/// Rendered labels per student with one `Skill:Task` column per pair.
struct LabelsTable {
  std::vector<LabelColumn> columns;
  std::vector<LabelRow> rows;

  /// CSV header `group,student[,source],<Skill:Task>...`. Throws TableError.
  static LabelsTable from_csv(std::string_view text);
  std::string to_csv() const;
  std::optional<std::size_t> column(std::string_view skill, std::string_view task) const;
};

struct CorrelationRow {
  std::string group;
  std::string task;
  std::string skill;
  std::size_t n = 0;
  std::optional<double> r;
  /// Why r is missing.
  std::string reason;
  /// Labeled students without a grade, and graded students without a label.
  std::vector<std::string> unrated;
  std::vector<std::string> unlabeled;
};

/// Correlates one skill column for one (group, task).
CorrelationRow correlate_skill(const LabelsTable& labels, const LabelScoreMapping& mapping,
                               const RatingsTable& ratings, std::string_view group,
                               std::string_view task, std::string_view skill);

/// Every (group, task) pair present in the ratings crossed with every skill
/// that has a column for that task. Ordered by first appearance in the
/// ratings, then by column order.
std::vector<CorrelationRow> correlate_all(const LabelsTable& labels,
                                          const LabelScoreMapping& mapping,
                                          const RatingsTable& ratings);

/// `group,task,skill,n,r` with r at full precision or `n/a`.
std::string correlations_to_csv(const std::vector<CorrelationRow>& rows);

/// Orders "A2" before "A10".
bool natural_less(std::string_view a, std::string_view b);

/// Rendered skill labels of a cohort: one row per (group, student), one
/// column per (skill, task). Skills keep model order; tasks, groups and
/// students are sorted naturally.
LabelsTable cohort_table(const std::vector<EvaluationTrace>& traces);

}  // namespace glmp
