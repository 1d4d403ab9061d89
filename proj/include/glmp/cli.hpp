#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glmp/fuzzy.hpp"

namespace glmp::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 2, kIoFailure = 3 };

struct RunConfig {
  std::filesystem::path model;
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path out_dir;
  double tie_epsilon = kDefaultTieEpsilon;
  unsigned jobs = 1;
  bool prompt = false;
  std::optional<std::filesystem::path> prompt_template;
  std::filesystem::path labels;
  std::filesystem::path ratings;
  std::optional<std::filesystem::path> mapping;
  std::optional<std::filesystem::path> output;
  /// 0 quiet, 1 normal, 2 verbose.
  int verbosity = 1;
};

/// Returns `path` when it exists; otherwise, for relative paths, the same
/// path under $GLMP_FIXTURES when that exists.
std::filesystem::path resolve_input(const std::filesystem::path& path);

/// Writes through a temporary file in the same directory and renames it into
/// place. Throws std::system_error.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Reads a whole file. Throws std::system_error.
std::string read_file(const std::filesystem::path& path);

int cmd_validate(const std::filesystem::path& model, std::ostream& out, std::ostream& err);
int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_correlate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace glmp::cli
