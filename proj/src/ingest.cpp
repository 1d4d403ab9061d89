#include "glmp/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "json.hpp"

#include "glmp/csv.hpp"
#include "glmp/names.hpp"
#include "glmp/numfmt.hpp"

namespace glmp {

std::optional<double> MeasureBundle::value(std::string_view measure) const {
  const std::string key = name_key(measure);
  for (const auto& [k, v] : values) {
    if (name_key(k) == key) return v;
  }
  return std::nullopt;
}

std::string MeasureBundle::group() const {
  auto it = metadata.find("group");
  return it == metadata.end() ? std::string() : it->second;
}

std::optional<BundleFormat> format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".json") return BundleFormat::Json;
  if (ext == ".csv") return BundleFormat::Csv;
  return std::nullopt;
}

bool is_anonymized_code(std::string_view code) {
  if (code.empty() || code.size() > 32) return false;
  return std::all_of(code.begin(), code.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-';
  });
}

namespace {

Diagnostic make(Severity sev, std::string_view code, std::string msg, std::size_t line = 1,
                std::size_t column = 1) {
  return {sev, std::string(code), std::move(msg), {line, column, 0, 0}};
}

std::string who(const MeasureBundle& b) {
  return "student '" + b.student + "', task '" + b.task + "'";
}

// Shared per-bundle checks: identifiers, unknown keys, missing measures,
// duplicates. Returns false when the bundle must be dropped.
class BundleChecker {
 public:
  BundleChecker(const GlmpModel& model, Diagnostics& diags) : model_(model), diags_(diags) {}

  bool accept(MeasureBundle& b, std::size_t line) {
    if (!is_anonymized_code(b.student)) {
      diags_.push_back(make(Severity::Error, diag::kStudentCode,
                            "student code '" + b.student +
                                "' is not an anonymized identifier (letters, digits, '_', '-')",
                            line));
      return false;
    }
    if (!is_anonymized_code(b.task)) {
      diags_.push_back(make(Severity::Error, diag::kMalformed,
                            "invalid task identifier '" + b.task + "' for student '" + b.student + "'",
                            line));
      return false;
    }
    if (!seen_.emplace(b.student, b.task).second) {
      diags_.push_back(make(Severity::Error, diag::kDuplicateBundle,
                            "duplicate bundle for " + who(b), line));
      return false;
    }
    std::vector<std::pair<std::string, double>> kept;
    std::set<std::string> keys;
    for (auto& [k, v] : b.values) {
      if (!model_.find_measure(k)) {
        diags_.push_back(make(Severity::Warning, diag::kUnknownMeasure,
                              "ignoring '" + k + "' for " + who(b) + ": not a measure of the model",
                              line));
        continue;
      }
      if (!keys.insert(name_key(k)).second) {
        diags_.push_back(make(Severity::Error, diag::kDuplicate,
                              "measure '" + k + "' given twice for " + who(b), line));
        return false;
      }
      kept.emplace_back(std::move(k), v);
    }
    b.values = std::move(kept);
    for (const auto& m : model_.measures) {
      if (!keys.count(name_key(m.name))) {
        diags_.push_back(make(Severity::Warning, diag::kMissingMeasure,
                              "missing measure '" + m.name + "' for " + who(b), line));
      }
    }
    return true;
  }

 private:
  const GlmpModel& model_;
  Diagnostics& diags_;
  std::set<std::pair<std::string, std::string>> seen_;
};

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

LoadResult parse_bundles_json(std::string_view text, const GlmpModel& model) {
  using json = nlohmann::ordered_json;
  LoadResult out;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    out.diagnostics.push_back(make(Severity::Error, diag::kMalformed, e.what(), line, col));
    return out;
  }
  if (!doc.is_object() || !doc.contains("students") || !doc["students"].is_array()) {
    out.diagnostics.push_back(
        make(Severity::Error, diag::kMalformed, "expected an object with a \"students\" array"));
    return out;
  }
  BundleChecker checker(model, out.diagnostics);
  std::size_t index = 0;
  for (const auto& rec : doc["students"]) {
    ++index;
    const std::string where = "record " + std::to_string(index);
    if (!rec.is_object() || !rec.contains("code") || !rec["code"].is_string() ||
        !rec.contains("task") || !rec["task"].is_string() || !rec.contains("values") ||
        !rec["values"].is_object()) {
      out.diagnostics.push_back(make(Severity::Error, diag::kMalformed,
                                     where + ": needs string \"code\", string \"task\" and object \"values\""));
      continue;
    }
    MeasureBundle b;
    b.student = rec["code"].get<std::string>();
    b.task = rec["task"].get<std::string>();
    bool ok = true;
    for (const auto& [k, v] : rec["values"].items()) {
      if (!v.is_number()) {
        out.diagnostics.push_back(make(Severity::Error, diag::kNonNumeric,
                                       where + " (" + who(b) + "): value of '" + k +
                                           "' is not a number: " + v.dump()));
        ok = false;
        continue;
      }
      b.values.emplace_back(k, v.get<double>());
    }
    if (rec.contains("group")) {
      if (rec["group"].is_string()) b.metadata["group"] = rec["group"].get<std::string>();
      else ok = false;
    }
    if (rec.contains("metadata") && rec["metadata"].is_object()) {
      for (const auto& [k, v] : rec["metadata"].items()) {
        b.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
    if (!ok) continue;
    if (checker.accept(b, 1)) out.bundles.push_back(std::move(b));
  }
  return out;
}

LoadResult parse_bundles_csv(std::string_view text, const GlmpModel& model) {
  LoadResult out;
  std::vector<csv::Row> rows;
  try {
    rows = csv::parse(text);
  } catch (const csv::ParseError& e) {
    out.diagnostics.push_back(make(Severity::Error, diag::kMalformed, e.what(), e.line()));
    return out;
  }
  if (rows.empty()) {
    out.diagnostics.push_back(make(Severity::Error, diag::kMalformed, "missing header row"));
    return out;
  }
  const auto& header = rows.front().fields;
  std::optional<std::size_t> student_col, task_col, group_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string key = name_key(header[c]);
    if (key == "student" && !student_col) student_col = c;
    else if (key == "task" && !task_col) task_col = c;
    else if (key == "group" && !group_col) group_col = c;
  }
  if (!student_col || !task_col) {
    out.diagnostics.push_back(
        make(Severity::Error, diag::kMalformed, "header must contain 'student' and 'task' columns"));
    return out;
  }
  BundleChecker checker(model, out.diagnostics);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.size()) {
      out.diagnostics.push_back(make(Severity::Error, diag::kMalformed,
                                     "row " + std::to_string(row.line) + " has " +
                                         std::to_string(row.fields.size()) + " fields, expected " +
                                         std::to_string(header.size()),
                                     row.line));
      continue;
    }
    MeasureBundle b;
    b.student = row.fields[*student_col];
    b.task = row.fields[*task_col];
    if (group_col) b.metadata["group"] = row.fields[*group_col];
    bool ok = true;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == *student_col || c == *task_col || (group_col && c == *group_col)) continue;
      const std::string& cell = row.fields[c];
      if (cell.empty()) continue;
      auto v = parse_decimal(cell);
      if (!v) {
        out.diagnostics.push_back(make(Severity::Error, diag::kNonNumeric,
                                       "row " + std::to_string(row.line) + ", column '" + header[c] +
                                           "': '" + cell + "' is not a number",
                                       row.line, c + 1));
        ok = false;
        continue;
      }
      b.values.emplace_back(header[c], *v);
    }
    if (!ok) continue;
    if (checker.accept(b, row.line)) out.bundles.push_back(std::move(b));
  }
  return out;
}

LoadResult load_bundles(const std::filesystem::path& path, BundleFormat format,
                        const GlmpModel& model) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                            "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  return format == BundleFormat::Json ? parse_bundles_json(text, model)
                                      : parse_bundles_csv(text, model);
}

std::string write_bundles_json(const std::vector<MeasureBundle>& bundles) {
  nlohmann::ordered_json doc;
  doc["students"] = nlohmann::ordered_json::array();
  for (const auto& b : bundles) {
    nlohmann::ordered_json rec;
    rec["code"] = b.student;
    rec["task"] = b.task;
    if (auto g = b.metadata.find("group"); g != b.metadata.end()) rec["group"] = g->second;
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    for (const auto& [k, v] : b.values) values[k] = v;
    rec["values"] = std::move(values);
    doc["students"].push_back(std::move(rec));
  }
  return doc.dump(2) + "\n";
}

double normalize(double raw, const MeasureSpec& spec) {
  if (!std::isfinite(raw)) {
    throw DomainError("value of '" + spec.name + "' is not a finite number");
  }
  if (spec.degenerate()) return 0.5;
  const double z = std::clamp((raw - spec.lo) / (spec.hi - spec.lo), 0.0, 1.0);
  return spec.invert ? 1.0 - z : z;
}

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw DomainError("percentile of an empty series");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(pct, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

GlmpModel fit_cohort_bounds(const GlmpModel& model, const std::vector<MeasureBundle>& bundles) {
  GlmpModel out = model;
  for (auto& m : out.measures) {
    if (!m.cohort_range) continue;
    std::vector<double> xs;
    for (const auto& b : bundles) {
      if (auto v = b.value(m.name)) xs.push_back(*v);
    }
    if (xs.empty()) {
      m.lo = m.hi = 0.0;
    } else {
      m.lo = percentile(xs, 5.0);
      m.hi = percentile(std::move(xs), 95.0);
    }
  }
  out.reindex();
  return out;
}

}  // namespace glmp
