#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "glmp/dsl.hpp"
#include "glmp/fuzzy.hpp"

namespace test_support {

namespace fs = std::filesystem;

inline fs::path fixtures() { return fs::path(GLMP_FIXTURE_DIR); }

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline glmp::GlmpModel load_model(const fs::path& p) {
  auto parsed = glmp::parse_model(glmp::ModelSource::from_file(p));
  if (!parsed.ok()) {
    std::string msg = "fixture " + p.string() + " does not parse:";
    for (const auto& d : parsed.diagnostics) msg += "\n  " + glmp::format(d);
    throw std::runtime_error(msg);
  }
  return std::move(*parsed.model);
}

/// Valid model fixtures shipped with the project.
inline std::vector<fs::path> valid_models() {
  return {fixtures() / "toy.glmp", fixtures() / "decision_making.glmp",
          fixtures() / "soft_skills.glmp"};
}

/// Fresh empty directory under the system temp dir.
inline fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("glmp-test-" + name + "-" +
                                              std::to_string(std::random_device{}()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

/// Random validity vector summing to one, with a chance of exact zeros.
inline glmp::ComputationalPerception random_cp(std::mt19937_64& rng,
                                               const glmp::VariablePtr& var) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(var->size());
  glmp::LabelVector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = u(rng) < 0.2 ? 0.0 : u(rng);
  if (w.sum() == 0.0) w(0) = 1.0;
  w /= w.sum();
  return {var, w, var->relevance()};
}

inline glmp::VariablePtr level_variable() {
  static const auto v =
      std::make_shared<const glmp::LinguisticVariable>(glmp::LinguisticVariable::default_level());
  return v;
}

}  // namespace test_support
