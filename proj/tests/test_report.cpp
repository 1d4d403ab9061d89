#include <doctest.h>

#include <cstdlib>
#include <functional>
#include <random>
#include <set>

#include "glmp/ingest.hpp"
#include "glmp/report.hpp"
#include "support.hpp"

using namespace glmp;
namespace fs = std::filesystem;

namespace {

PreReportNode leaf(std::string name, std::string label, std::string text) {
  PreReportNode n;
  n.component = std::move(name);
  n.level = "attribute";
  n.label = std::move(label);
  n.label_text = std::move(text);
  n.labels = {"Low", "Medium", "High"};
  n.validity = {0.0, 1.0, 0.0};
  n.text_template = "{component} is {label}.";
  return n;
}

PreReport trace_report(const char* model_file, const MeasureBundle& bundle) {
  auto model = std::make_shared<const GlmpModel>(
      test_support::load_model(test_support::fixtures() / model_file));
  return build_prereport(evaluate_network(model, bundle));
}

PreReport demo_report() {
  const auto model = test_support::load_model(test_support::fixtures() / "decision_making.glmp");
  const auto loaded =
      load_bundles(test_support::fixtures() / "demo" / "bundle.json", BundleFormat::Json, model);
  const auto fitted = std::make_shared<const GlmpModel>(fit_cohort_bounds(model, loaded.bundles));
  return build_prereport(evaluate_network(fitted, loaded.bundles.at(0)));
}

MeasureBundle random_bundle(const GlmpModel& model, std::mt19937_64& rng) {
  MeasureBundle b{"R1", "T1", {}, {}};
  for (const auto& m : model.measures) {
    std::uniform_real_distribution<double> u(m.lo, m.hi);
    b.values.emplace_back(m.name, m.cohort_range ? 0.5 : u(rng));
  }
  return b;
}

void check_golden(const fs::path& path, const std::string& actual) {
  if (std::getenv("GLMP_UPDATE_GOLDEN")) {
    fs::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary) << actual;
  }
  CAPTURE(path.string());
  REQUIRE(fs::exists(path));
  CHECK(test_support::slurp(path) == actual);
}

void walk(const PreReportNode& n, const std::function<void(const PreReportNode&)>& f) {
  f(n);
  for (const auto& c : n.children) walk(c, f);
}

}  // namespace

TEST_SUITE("pre-report") {
  TEST_CASE("toy model gives a two-node tree") {
    const auto pre = trace_report("toy.glmp", {"X1", "T1", {{"Score", 0.5}}, {}});
    REQUIRE(pre.skills.size() == 1);
    const auto& skill = pre.skills[0];
    CHECK(skill.component == "Overall");
    CHECK(skill.level == "skill");
    CHECK(skill.node_count() == 2);
    REQUIRE(skill.children.size() == 1);
    CHECK(skill.children[0].component == "Score");
    CHECK(skill.children[0].raw == 0.5);
    CHECK(skill.label == "M");
  }

  TEST_CASE("JSON round trip is exact") {
    std::mt19937_64 rng(51);
    const auto model = std::make_shared<const GlmpModel>(
        test_support::load_model(test_support::fixtures() / "soft_skills.glmp"));
    for (int trial = 0; trial < 20; ++trial) {
      const auto pre = build_prereport(evaluate_network(model, random_bundle(*model, rng)));
      const std::string json = prereport_to_json(pre);
      CHECK(prereport_to_json(prereport_from_json(json)) == json);
    }
  }

  TEST_CASE("schema violations are rejected") {
    CHECK_THROWS_AS(prereport_from_json("[]"), SchemaError);
    CHECK_THROWS_AS(prereport_from_json("{"), SchemaError);
    CHECK_THROWS_AS(
        prereport_from_json(R"({"schema":"other/1","student":"A","task":"T1","skills":[]})"),
        SchemaError);
    CHECK_THROWS_WITH_AS(
        prereport_from_json(R"({"schema":"glmp-prereport/1","student":"A","task":"T1","skills":[]})"),
        doctest::Contains("no skills"), SchemaError);
  }

  TEST_CASE("labels and node counts are faithful to the trace") {
    std::mt19937_64 rng(52);
    const auto model = std::make_shared<const GlmpModel>(
        test_support::load_model(test_support::fixtures() / "soft_skills.glmp"));
    for (int trial = 0; trial < 30; ++trial) {
      const auto trace = evaluate_network(model, random_bundle(*model, rng));
      const auto pre = build_prereport(trace);
      REQUIRE(pre.skills.size() == model->skills().size());
      for (const auto& skill : pre.skills) {
        // Reachable PMs by plain graph search over the model.
        std::set<std::size_t> reach;
        std::vector<std::size_t> stack{*model->pm_index(skill.component)};
        while (!stack.empty()) {
          const std::size_t p = stack.back();
          stack.pop_back();
          if (!reach.insert(p).second) continue;
          for (const auto& in : model->pms[p].inputs) stack.push_back(*model->pm_index(in));
        }
        std::size_t expanded = 0;
        walk(skill, [&](const PreReportNode& n) {
          if (!n.ref) ++expanded;
          const auto& step = trace.step(*model->pm_index(n.component));
          REQUIRE(n.label == step.outcome.rendered);
        });
        CHECK(expanded == reach.size());
      }
    }
  }
}

TEST_SUITE("text") {
  TEST_CASE("default template") {
    auto n = leaf("Creativity", "M", "Medium");
    CHECK(fill_template(n) == "Creativity is Medium.");
  }

  TEST_CASE("child placeholders") {
    auto n = leaf("Decision-making", "H", "High");
    n.text_template = "{component} is {label}: accuracy is {child:Accuracy}.";
    n.children.push_back(leaf("Accuracy", "M/H", "Medium/High"));
    CHECK(fill_template(n) == "Decision-making is High: accuracy is Medium/High.");
    n.text_template = "{child:Nobody}";
    CHECK_THROWS_AS(fill_template(n), SchemaError);
  }

  TEST_CASE("equal siblings share one sentence") {
    PreReport pre{"A1", "T1", "", {}};
    auto skill = leaf("Communication", "M", "Medium");
    skill.level = "skill";
    auto dim = leaf("Expression", "M", "Medium");
    for (const char* c : {"Gaze", "Smile", "Gesture"}) dim.children.push_back(leaf(c, "M", "Medium"));
    skill.children.push_back(dim);
    pre.skills.push_back(skill);
    const auto doc = render_text(pre);
    REQUIRE(doc.sections.size() == 1);
    REQUIRE(doc.sections[0].explanations.size() == 1);
    CHECK(doc.sections[0].explanations[0] ==
          "Expression is Medium. Gaze, Smile and Gesture are Medium.");
  }

  TEST_CASE("strengths and improvement areas") {
    PreReport pre{"A1", "T1", "", {}};
    auto skill = leaf("Creativity", "M", "Medium");
    skill.level = "skill";
    skill.children = {leaf("Originality", "H", "High"), leaf("Quantity", "L/M", "Low/Medium"),
                      leaf("Examples", "M", "Medium")};
    pre.skills.push_back(skill);
    const auto doc = render_text(pre);
    CHECK(doc.sections[0].strengths == std::vector<std::string>{"Originality (High)"});
    CHECK(doc.sections[0].improvements == std::vector<std::string>{"Quantity (Low/Medium)"});
  }

  TEST_CASE("rendering is deterministic and free of jargon") {
    std::mt19937_64 rng(53);
    const auto model = std::make_shared<const GlmpModel>(
        test_support::load_model(test_support::fixtures() / "soft_skills.glmp"));
    for (int trial = 0; trial < 20; ++trial) {
      const auto pre = build_prereport(evaluate_network(model, random_bundle(*model, rng)));
      const std::string a = render_text(pre).markdown();
      CHECK(a == render_text(pre).markdown());
      CHECK(find_jargon(a, default_jargon_blocklist()).empty());
    }
  }

  TEST_CASE("jargon matches whole words only") {
    const auto& words = default_jargon_blocklist();
    CHECK(find_jargon("The fuzzy part.", words) == std::vector<std::string>{"fuzzy"});
    CHECK(find_jargon("Aggregations of ideas", words).empty());
    CHECK(find_jargon("A Rule Base appears", words) == std::vector<std::string>{"rule base"});
  }
}

TEST_SUITE("prompt") {
  TEST_CASE("package carries the id and the whole pre-report") {
    const auto pre = demo_report();
    const auto pkg = emit_prompt_package(pre);
    CHECK(pkg.text.rfind("template: feedback-report/1\n", 0) == 0);
    CHECK(pkg.text.find(prereport_to_json(pre)) != std::string::npos);
    CHECK(pkg.text.find("Decision-making: Accuracy (High)") != std::string::npos);
  }

  TEST_CASE("no high components says so") {
    PreReport pre{"A1", "T1", "", {}};
    auto skill = leaf("Creativity", "L", "Low");
    skill.level = "skill";
    skill.children = {leaf("Originality", "L", "Low")};
    pre.skills.push_back(skill);
    const auto pkg = emit_prompt_package(pre);
    CHECK(pkg.text.find("There are no high-performing areas in this pre-report.") !=
          std::string::npos);
  }

  TEST_CASE("custom template and id") {
    const auto pkg = emit_prompt_package(demo_report(), "Student {student}, {unknown}.", "mine/2");
    CHECK(pkg.text == "template: mine/2\n\nStudent D1, {unknown}.\n");
  }
}

TEST_SUITE("golden") {
  TEST_CASE("demo bundle outputs") {
    const auto pre = demo_report();
    const fs::path dir = test_support::fixtures() / "golden" / "demo";
    check_golden(dir / "prereport.json", prereport_to_json(pre));
    check_golden(dir / "report.md", render_text(pre).markdown());
    check_golden(dir / "prompt.txt", emit_prompt_package(pre).text);
  }
}
