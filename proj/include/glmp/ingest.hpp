#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "glmp/diagnostics.hpp"
#include "glmp/model.hpp"

namespace glmp {

/// Raw measure values for one (student, task). Student codes are anonymized
/// identifiers; `values` keeps the keys and order of the input file.
struct MeasureBundle {
  std::string student;
  std::string task;
  std::vector<std::pair<std::string, double>> values;
  /// Optional provenance such as "group" or modality notes.
  std::map<std::string, std::string> metadata;

  /// Value of a measure, matching keys with name_key().
  std::optional<double> value(std::string_view measure) const;
  std::string group() const;
};

enum class BundleFormat { Json, Csv };

std::optional<BundleFormat> format_from_path(const std::filesystem::path& path);

struct LoadResult {
  std::vector<MeasureBundle> bundles;
  /// Errors drop the offending bundle (or the whole file when it cannot be
  /// parsed); warnings leave the bundle in place.
  Diagnostics diagnostics;
};

/// JSON: {"students":[{"code":"A1","task":"T1","group":"ML-2022","values":{...}}]}
LoadResult parse_bundles_json(std::string_view text, const GlmpModel& model);
/// CSV: header `student,task,<measure...>` (an optional `group` column is
/// accepted); comma separator, UTF-8.
LoadResult parse_bundles_csv(std::string_view text, const GlmpModel& model);

/// Throws std::system_error when the file cannot be read.
LoadResult load_bundles(const std::filesystem::path& path, BundleFormat format,
                        const GlmpModel& model);

/// Inverse of parse_bundles_json; numbers use the shortest round-trip form.
std::string write_bundles_json(const std::vector<MeasureBundle>& bundles);

/// True when a code looks like an anonymized identifier (letters, digits,
/// '_' or '-', at most 32 characters).
bool is_anonymized_code(std::string_view code);

/// Maps a raw value into [0,1]: clamp((raw - lo) / (hi - lo)), mirrored when
/// the measure is inverted. Degenerate bounds (lo == hi) give 0.5. Throws
/// DomainError for non-finite input.
double normalize(double raw, const MeasureSpec& spec);

/// Linear-interpolated percentile (0..100) of unsorted values.
double percentile(std::vector<double> values, double pct);

/// Copy of the model with bounds of `range cohort` measures fitted to the
/// 5th and 95th percentiles of the bundles' values.
GlmpModel fit_cohort_bounds(const GlmpModel& model, const std::vector<MeasureBundle>& bundles);

}  // namespace glmp
