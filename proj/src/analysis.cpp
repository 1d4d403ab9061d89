#include "glmp/analysis.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "glmp/csv.hpp"
#include "glmp/names.hpp"
#include "glmp/numfmt.hpp"

namespace glmp {

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: series differ in length");
  if (x.size() < 3) {
    throw UndefinedCorrelation("fewer than 3 pairs (n=" + std::to_string(x.size()) + ")");
  }
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::Map<const Eigen::ArrayXd> xa(x.data(), n), ya(y.data(), n);
  const Eigen::ArrayXd dx = xa - xa.mean();
  const Eigen::ArrayXd dy = ya - ya.mean();
  const double sxx = (dx * dx).sum();
  const double syy = (dy * dy).sum();
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("constant series");
  const double r = (dx * dy).sum() / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

LabelScoreMapping::LabelScoreMapping()
    : entries_{{"L", 1.0}, {"L/M", 2.0}, {"M", 3.0}, {"M/H", 4.0}, {"H", 5.0}} {}

LabelScoreMapping::LabelScoreMapping(std::vector<std::pair<std::string, double>> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw TableError("label mapping is empty");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!seen.insert(entries_[i].first).second) {
      throw TableError("label '" + entries_[i].first + "' mapped twice");
    }
    if (!std::isfinite(entries_[i].second)) {
      throw TableError("score of '" + entries_[i].first + "' is not finite");
    }
    if (i > 0 && !(entries_[i].second > entries_[i - 1].second)) {
      throw TableError("scores must increase strictly in label order ('" + entries_[i - 1].first +
                       "' then '" + entries_[i].first + "')");
    }
  }
}

namespace {

std::vector<csv::Row> parse_table(std::string_view text) {
  try {
    return csv::parse(text);
  } catch (const csv::ParseError& e) {
    throw TableError(e.what());
  }
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                       std::string_view name) {
  const std::string key = name_key(name);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (name_key(header[i]) == key) return i;
  }
  return std::nullopt;
}

std::size_t require_column(const std::vector<std::string>& header, std::string_view name) {
  auto c = find_column(header, name);
  if (!c) throw TableError("missing column '" + std::string(name) + "'");
  return *c;
}

void check_width(const csv::Row& row, std::size_t width) {
  if (row.fields.size() != width) {
    throw TableError("line " + std::to_string(row.line) + ": expected " + std::to_string(width) +
                     " fields, found " + std::to_string(row.fields.size()));
  }
}

}  // namespace

LabelScoreMapping LabelScoreMapping::from_csv(std::string_view text) {
  const auto rows = parse_table(text);
  if (rows.empty()) throw TableError("label mapping has no header");
  const std::size_t lc = require_column(rows[0].fields, "label");
  const std::size_t sc = require_column(rows[0].fields, "score");
  std::vector<std::pair<std::string, double>> entries;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    check_width(rows[i], rows[0].fields.size());
    const auto v = parse_decimal(rows[i].fields[sc]);
    if (!v) {
      throw TableError("line " + std::to_string(rows[i].line) + ": score '" + rows[i].fields[sc] +
                       "' is not a number");
    }
    entries.emplace_back(rows[i].fields[lc], *v);
  }
  return LabelScoreMapping(std::move(entries));
}

std::optional<double> LabelScoreMapping::score(std::string_view label) const {
  for (const auto& [l, s] : entries_) {
    if (l == label) return s;
  }
  return std::nullopt;
}

RatingsTable RatingsTable::from_csv(std::string_view text) {
  const auto rows = parse_table(text);
  if (rows.empty()) throw TableError("ratings table has no header");
  const auto& header = rows[0].fields;
  const std::size_t gc = require_column(header, "group");
  const std::size_t stc = require_column(header, "student");
  const std::size_t tc = require_column(header, "task");
  const std::size_t grc = require_column(header, "grade");
  const auto src = find_column(header, "source");
  RatingsTable out;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    check_width(row, header.size());
    const std::string at = "line " + std::to_string(row.line) + ": ";
    const auto grade = parse_decimal(row.fields[grc]);
    if (!grade) throw TableError(at + "grade '" + row.fields[grc] + "' is not a number");
    if (*grade < 0.0 || *grade > 100.0) {
      throw TableError(at + "grade " + row.fields[grc] + " outside [0, 100]");
    }
    Rating r{row.fields[gc], row.fields[stc], row.fields[tc], *grade,
             src ? row.fields[*src] : std::string()};
    if (!seen.emplace(r.group, r.student, r.task).second) {
      throw TableError(at + "duplicate rating for " + r.group + "/" + r.student + "/" + r.task);
    }
    out.rows.push_back(std::move(r));
  }
  return out;
}

std::optional<double> RatingsTable::grade(std::string_view group, std::string_view student,
                                          std::string_view task) const {
  for (const auto& r : rows) {
    if (r.group == group && r.student == student && r.task == task) return r.grade;
  }
  return std::nullopt;
}

LabelsTable LabelsTable::from_csv(std::string_view text) {
  const auto rows = parse_table(text);
  if (rows.empty()) throw TableError("labels table has no header");
  const auto& header = rows[0].fields;
  const std::size_t gc = require_column(header, "group");
  const std::size_t sc = require_column(header, "student");
  const auto src = find_column(header, "source");
  LabelsTable out;
  std::vector<std::size_t> label_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == gc || c == sc || (src && c == *src)) continue;
    const auto colon = header[c].rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == header[c].size()) {
      throw TableError("column '" + header[c] + "' is not of the form Skill:Task");
    }
    out.columns.push_back({header[c].substr(0, colon), header[c].substr(colon + 1)});
    label_cols.push_back(c);
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    check_width(row, header.size());
    LabelRow lr{row.fields[gc], row.fields[sc], src ? row.fields[*src] : std::string(), {}};
    if (!seen.emplace(lr.group, lr.student).second) {
      throw TableError("line " + std::to_string(row.line) + ": duplicate row for " + lr.group +
                       "/" + lr.student);
    }
    for (std::size_t c : label_cols) lr.cells.push_back(row.fields[c]);
    out.rows.push_back(std::move(lr));
  }
  return out;
}

std::string LabelsTable::to_csv() const {
  const bool with_source = std::any_of(rows.begin(), rows.end(),
                                       [](const LabelRow& r) { return !r.source.empty(); });
  std::vector<std::string> header{"group", "student"};
  if (with_source) header.emplace_back("source");
  for (const auto& c : columns) header.push_back(c.header());
  std::string out = csv::join(header) + "\n";
  for (const auto& r : rows) {
    std::vector<std::string> fields{r.group, r.student};
    if (with_source) fields.push_back(r.source);
    fields.insert(fields.end(), r.cells.begin(), r.cells.end());
    out += csv::join(fields) + "\n";
  }
  return out;
}

std::optional<std::size_t> LabelsTable::column(std::string_view skill,
                                               std::string_view task) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (name_key(columns[i].skill) == name_key(skill) && columns[i].task == task) return i;
  }
  return std::nullopt;
}

CorrelationRow correlate_skill(const LabelsTable& labels, const LabelScoreMapping& mapping,
                               const RatingsTable& ratings, std::string_view group,
                               std::string_view task, std::string_view skill) {
  CorrelationRow row;
  row.group = group;
  row.task = task;
  row.skill = skill;
  const auto col = labels.column(skill, task);
  if (!col) {
    row.reason = "no label column " + std::string(skill) + ":" + std::string(task);
    return row;
  }
  row.skill = labels.columns[*col].skill;
  std::vector<double> x, y;
  std::set<std::string> labeled;
  for (const auto& lr : labels.rows) {
    if (lr.group != group) continue;
    const std::string& cell = lr.cells[*col];
    if (cell.empty()) continue;
    const auto score = mapping.score(cell);
    if (!score) throw TableError("label '" + cell + "' of " + lr.student + " has no score");
    labeled.insert(lr.student);
    const auto grade = ratings.grade(group, lr.student, task);
    if (!grade) {
      row.unrated.push_back(lr.student);
      continue;
    }
    x.push_back(*score);
    y.push_back(*grade);
  }
  for (const auto& r : ratings.rows) {
    if (r.group == group && r.task == task && !labeled.count(r.student)) {
      row.unlabeled.push_back(r.student);
    }
  }
  row.n = x.size();
  try {
    row.r = pearson(x, y);
  } catch (const UndefinedCorrelation& e) {
    row.reason = e.what();
  }
  return row;
}

std::vector<CorrelationRow> correlate_all(const LabelsTable& labels,
                                          const LabelScoreMapping& mapping,
                                          const RatingsTable& ratings) {
  std::vector<std::pair<std::string, std::string>> cells;
  for (const auto& r : ratings.rows) {
    std::pair<std::string, std::string> key{r.group, r.task};
    if (std::find(cells.begin(), cells.end(), key) == cells.end()) cells.push_back(key);
  }
  std::vector<CorrelationRow> out;
  for (const auto& [group, task] : cells) {
    for (const auto& c : labels.columns) {
      if (c.task != task) continue;
      out.push_back(correlate_skill(labels, mapping, ratings, group, task, c.skill));
    }
  }
  return out;
}

std::string correlations_to_csv(const std::vector<CorrelationRow>& rows) {
  std::string out = "group,task,skill,n,r\n";
  for (const auto& r : rows) {
    out += csv::join({r.group, r.task, r.skill, std::to_string(r.n),
                      r.r ? format_decimal(*r.r) : std::string("n/a")}) +
           "\n";
  }
  return out;
}

bool natural_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  const auto digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < a.size() && j < b.size()) {
    if (digit(a[i]) && digit(b[j])) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && digit(a[ie])) ++ie;
      while (je < b.size() && digit(b[je])) ++je;
      std::string_view na = a.substr(i, ie - i), nb = b.substr(j, je - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j];
    ++i;
    ++j;
  }
  if (a.size() - i != b.size() - j) return a.size() - i < b.size() - j;
  return a < b;
}

LabelsTable cohort_table(const std::vector<EvaluationTrace>& traces) {
  LabelsTable table;
  if (traces.empty()) return table;
  const GlmpModel& model = *traces.front().model;
  const auto skills = model.skills();
  const auto nat = [](const std::string& a, const std::string& b) { return natural_less(a, b); };
  std::set<std::string, decltype(nat)> tasks(nat);
  for (const auto& t : traces) tasks.insert(t.task);
  for (std::size_t s : skills) {
    for (const auto& task : tasks) table.columns.push_back({model.pms[s].name, task});
  }
  const auto row_less = [](const std::pair<std::string, std::string>& a,
                           const std::pair<std::string, std::string>& b) {
    if (a.first != b.first) return natural_less(a.first, b.first);
    return natural_less(a.second, b.second);
  };
  std::map<std::pair<std::string, std::string>, std::vector<std::string>, decltype(row_less)>
      rows(row_less);
  for (const auto& t : traces) {
    auto& cells = rows[{t.group, t.student}];
    cells.resize(table.columns.size());
    const std::size_t ti = static_cast<std::size_t>(
        std::distance(tasks.begin(), tasks.find(t.task)));
    for (std::size_t k = 0; k < skills.size(); ++k) {
      cells[k * tasks.size() + ti] = t.step(skills[k]).outcome.rendered;
    }
  }
  for (auto& [key, cells] : rows) table.rows.push_back({key.first, key.second, {}, std::move(cells)});
  return table;
}

}  // namespace glmp
