#include <doctest.h>

#include <cmath>
#include <random>

#include "glmp/ingest.hpp"
#include "glmp/numfmt.hpp"
#include "support.hpp"

using namespace glmp;

namespace {

const GlmpModel& soft_skills() {
  static const GlmpModel m = test_support::load_model(test_support::fixtures() / "soft_skills.glmp");
  return m;
}

bool has_code(const Diagnostics& ds, std::string_view code, Severity sev) {
  for (const auto& d : ds) {
    if (d.code == code && d.severity == sev) return true;
  }
  return false;
}

MeasureSpec spec(double lo, double hi, bool invert) {
  MeasureSpec s;
  s.name = "m";
  s.lo = lo;
  s.hi = hi;
  s.invert = invert;
  return s;
}

}  // namespace

TEST_SUITE("loading") {
  TEST_CASE("JSON with all seventeen measures gives one clean bundle") {
    const auto& cohort = test_support::slurp(test_support::fixtures() / "cohort" / "measures.json");
    const auto all = parse_bundles_json(cohort, soft_skills());
    REQUIRE(all.diagnostics.empty());
    REQUIRE(all.bundles.size() == 147);
    const auto& b = all.bundles.front();
    CHECK(b.values.size() == 17);
    for (const auto& m : soft_skills().measures) CHECK(b.value(m.name).has_value());
    CHECK(b.group() == "ML-2022");
  }

  TEST_CASE("non-numeric CSV cell names row and column") {
    const std::string text =
        "student,task,speech_speed,gaze\n"
        "A1,T1,4.2,0.5\n"
        "A2,T1,fast,0.5\n";
    const auto r = parse_bundles_csv(text, soft_skills());
    REQUIRE(r.bundles.size() == 1);
    bool found = false;
    for (const auto& d : r.diagnostics) {
      if (d.code != diag::kNonNumeric) continue;
      found = true;
      CHECK(d.message.find("row 3") != std::string::npos);
      CHECK(d.message.find("speech_speed") != std::string::npos);
      CHECK(d.span.line == 3);
    }
    CHECK(found);
  }

  TEST_CASE("duplicate student and task") {
    const std::string text =
        "student,task,gaze\n"
        "A1,T1,0.5\n"
        "A1,T1,0.6\n";
    const auto r = parse_bundles_csv(text, soft_skills());
    CHECK(r.bundles.size() == 1);
    bool found = false;
    for (const auto& d : r.diagnostics) {
      if (d.code == diag::kDuplicateBundle) {
        found = true;
        CHECK(d.message.find("duplicate bundle") != std::string::npos);
      }
    }
    CHECK(found);
  }

  TEST_CASE("extra keys warn and missing measures are reported") {
    const std::string text = R"({"students":[{"code":"A1","task":"T1","values":{"gaze":0.5,"shoe_size":44}}]})";
    const auto r = parse_bundles_json(text, soft_skills());
    REQUIRE(r.bundles.size() == 1);
    CHECK(r.bundles[0].values.size() == 1);
    CHECK(has_code(r.diagnostics, diag::kUnknownMeasure, Severity::Warning));
    CHECK(has_code(r.diagnostics, diag::kMissingMeasure, Severity::Warning));
    CHECK_FALSE(has_errors(r.diagnostics));
  }

  TEST_CASE("malformed documents") {
    CHECK(has_errors(parse_bundles_json("{", soft_skills()).diagnostics));
    CHECK(has_errors(parse_bundles_json(R"({"people":[]})", soft_skills()).diagnostics));
    CHECK(has_errors(parse_bundles_csv("a,b\n1,2\n", soft_skills()).diagnostics));
    CHECK(has_errors(parse_bundles_csv("student,task\n\"A1,T1\n", soft_skills()).diagnostics));
  }

  TEST_CASE("student codes must look anonymized") {
    CHECK(is_anonymized_code("CB11"));
    CHECK_FALSE(is_anonymized_code("Jane Doe"));
    CHECK_FALSE(is_anonymized_code("jane.doe@example.com"));
    const auto r = parse_bundles_csv("student,task,gaze\nJane Doe,T1,0.5\n", soft_skills());
    CHECK(r.bundles.empty());
    CHECK(has_code(r.diagnostics, diag::kStudentCode, Severity::Error));
  }

  TEST_CASE("emitting and reloading preserves every value") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1e4, 1e4);
    std::vector<MeasureBundle> bundles;
    for (int i = 0; i < 50; ++i) {
      MeasureBundle b{"S" + std::to_string(i), "T1", {}, {{"group", "G"}}};
      for (const auto& m : soft_skills().measures) {
        // Nine significant digits, the precision the loader promises to keep.
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.8e", u(rng));
        b.values.emplace_back(m.name, *parse_decimal(buf));
      }
      bundles.push_back(std::move(b));
    }
    const auto back = parse_bundles_json(write_bundles_json(bundles), soft_skills());
    REQUIRE(back.bundles.size() == bundles.size());
    for (std::size_t i = 0; i < bundles.size(); ++i) {
      REQUIRE(back.bundles[i].values == bundles[i].values);
      CHECK(back.bundles[i].group() == "G");
    }
  }
}

TEST_SUITE("normalization") {
  TEST_CASE("bounds and symmetry") {
    CHECK(normalize(0, spec(0, 30, false)) == 0.0);
    CHECK(normalize(0, spec(0, 30, true)) == 1.0);
    CHECK(normalize(15, spec(0, 30, false)) == 0.5);
    CHECK(normalize(15, spec(0, 30, true)) == 0.5);
  }

  TEST_CASE("inverted reaction time") {
    // 1 - 12/30
    CHECK(normalize(12, spec(0, 30, true)) == doctest::Approx(0.6).epsilon(1e-15));
  }

  TEST_CASE("degenerate bounds give the middle") {
    CHECK(normalize(3, spec(2, 2, false)) == 0.5);
  }

  TEST_CASE("non-finite input") {
    CHECK_THROWS_AS(normalize(std::nan(""), spec(0, 1, false)), DomainError);
    CHECK_THROWS_AS(normalize(INFINITY, spec(0, 1, false)), DomainError);
  }

  TEST_CASE("monotone and clamped far outside the range") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> bound(-100, 100), width(0.001, 50);
    for (int trial = 0; trial < 2000; ++trial) {
      const double lo = bound(rng), hi = lo + width(rng);
      const bool invert = trial % 2 == 1;
      const MeasureSpec s = spec(lo, hi, invert);
      std::uniform_real_distribution<double> raw(lo - 10 * (hi - lo), hi + 10 * (hi - lo));
      double a = raw(rng), b = raw(rng);
      if (a > b) std::swap(a, b);
      const double na = normalize(a, s), nb = normalize(b, s);
      REQUIRE(na >= 0.0);
      REQUIRE(na <= 1.0);
      REQUIRE(nb >= 0.0);
      REQUIRE(nb <= 1.0);
      if (invert) REQUIRE(na >= nb);
      else REQUIRE(na <= nb);
    }
  }

  TEST_CASE("percentiles interpolate linearly") {
    CHECK(percentile({1, 2, 3, 4, 5}, 50) == 3.0);
    CHECK(percentile({0, 10}, 5) == doctest::Approx(0.5));
    CHECK(percentile({4}, 95) == 4.0);
  }

  TEST_CASE("cohort bounds are fitted for cohort measures only") {
    std::vector<MeasureBundle> bundles;
    for (int i = 0; i <= 100; ++i) {
      bundles.push_back({"S" + std::to_string(i), "T1", {{"vagueness", i * 0.1}, {"gaze", 0.3}}, {}});
    }
    const GlmpModel fitted = fit_cohort_bounds(soft_skills(), bundles);
    const MeasureSpec* v = fitted.find_measure("Vagueness");
    REQUIRE(v != nullptr);
    CHECK(v->lo == doctest::Approx(0.5));
    CHECK(v->hi == doctest::Approx(9.5));
    CHECK(fitted.find_measure("Gaze")->hi == 1.0);
  }
}
