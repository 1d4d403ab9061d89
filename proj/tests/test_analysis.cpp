#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "glmp/analysis.hpp"
#include "support.hpp"

using namespace glmp;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == ',') out.emplace_back();
    else if (c != '\r') out.back().push_back(c);
  }
  return out;
}

std::vector<std::vector<std::string>> read_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) rows.push_back(split(line));
  }
  return rows;
}

// Textbook two-pass formula in long double.
double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

// Correlation of one labels column against grades, computed from the raw
// CSV text without the library's table code.
double oracle_cell(const std::string& group, const std::string& task, const std::string& skill) {
  const std::map<std::string, double> score{{"L", 1}, {"L/M", 2}, {"M", 3}, {"M/H", 4}, {"H", 5}};
  const auto labels = read_rows(test_support::slurp(test_support::fixtures() / "published" / "labels.csv"));
  const auto ratings = read_rows(test_support::slurp(test_support::fixtures() / "published" / "ratings.csv"));
  std::size_t col = 0;
  for (std::size_t c = 0; c < labels[0].size(); ++c) {
    if (labels[0][c] == skill + ":" + task) col = c;
  }
  REQUIRE(col > 0);
  std::map<std::string, double> grade;
  for (std::size_t r = 1; r < ratings.size(); ++r) {
    if (ratings[r][0] == group && ratings[r][2] == task) grade[ratings[r][1]] = std::stod(ratings[r][3]);
  }
  std::vector<double> x, y;
  for (std::size_t r = 1; r < labels.size(); ++r) {
    const auto& row = labels[r];
    if (row[0] != group || row[col].empty() || !grade.count(row[1])) continue;
    x.push_back(score.at(row[col]));
    y.push_back(grade[row[1]]);
  }
  return oracle_pearson(x, y);
}

struct PublishedTables {
  LabelsTable labels = LabelsTable::from_csv(
      test_support::slurp(test_support::fixtures() / "published" / "labels.csv"));
  RatingsTable ratings = RatingsTable::from_csv(
      test_support::slurp(test_support::fixtures() / "published" / "ratings.csv"));
};

}  // namespace

TEST_SUITE("pearson") {
  TEST_CASE("perfect and inverse lines") {
    CHECK(pearson({1, 2, 3}, {2, 4, 6}) == 1.0);
    CHECK(pearson({1, 2, 3}, {6, 4, 2}) == -1.0);
    CHECK(pearson({1, 2, 3, 4}, {1, 3, 2, 4}) == doctest::Approx(0.8));
  }

  TEST_CASE("undefined cases") {
    CHECK_THROWS_AS(pearson({1, 2}, {1, 2}), UndefinedCorrelation);
    CHECK_THROWS_AS(pearson({3, 3, 3}, {1, 2, 3}), UndefinedCorrelation);
    CHECK_THROWS_AS(pearson({1, 2, 3}, {1, 2}), std::invalid_argument);
  }

  TEST_CASE("bounded, symmetric and affine invariant") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(-50, 50), a(0.1, 10), b(-100, 100);
    for (int trial = 0; trial < 2000; ++trial) {
      const std::size_t n = 3 + rng() % 40;
      std::vector<double> x(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = u(rng);
        y[i] = u(rng);
      }
      const double r = pearson(x, y);
      REQUIRE(std::abs(r) <= 1.0);
      REQUIRE(pearson(y, x) == r);
      REQUIRE(r == doctest::Approx(oracle_pearson(x, y)).epsilon(1e-10));
      const double sa = a(rng), sb = b(rng);
      std::vector<double> x2 = x;
      for (double& v : x2) v = sa * v + sb;
      REQUIRE(pearson(x2, y) == doctest::Approx(r).epsilon(1e-9));
    }
  }
}

TEST_SUITE("tables") {
  TEST_CASE("default mapping and validation") {
    const LabelScoreMapping m;
    CHECK(m.score("L") == 1.0);
    CHECK(m.score("M/H") == 4.0);
    CHECK_FALSE(m.score("X").has_value());
    CHECK_THROWS_AS(LabelScoreMapping::from_csv("label,score\nL,2\nM,1\n"), TableError);
    CHECK_THROWS_AS(LabelScoreMapping::from_csv("label,score\nL,1\nL,2\n"), TableError);
    CHECK(LabelScoreMapping::from_csv("label,score\nL,0\nM,0.5\nH,1\n").score("M") == 0.5);
  }

  TEST_CASE("ratings validation") {
    CHECK_THROWS_AS(RatingsTable::from_csv("group,student,task,grade\nG,A1,T1,101\n"), TableError);
    CHECK_THROWS_AS(RatingsTable::from_csv("group,student,task,grade\nG,A1,T1,x\n"), TableError);
    CHECK_THROWS_AS(RatingsTable::from_csv("group,student,task,grade\nG,A1,T1,5\nG,A1,T1,6\n"),
                    TableError);
    CHECK_THROWS_AS(RatingsTable::from_csv("group,student,grade\n"), TableError);
  }

  TEST_CASE("labels round trip") {
    const PublishedTables t;
    CHECK(LabelsTable::from_csv(t.labels.to_csv()).to_csv() == t.labels.to_csv());
    CHECK_THROWS_AS(LabelsTable::from_csv("group,student,Creativity\n"), TableError);
  }

  TEST_CASE("natural order") {
    CHECK(natural_less("A2", "A10"));
    CHECK_FALSE(natural_less("A10", "A2"));
    CHECK(natural_less("CA1", "CB1"));
    CHECK(natural_less("T1", "T2"));
  }
}

TEST_SUITE("correlation") {
  TEST_CASE("first cohort, first task against the oracle") {
    const PublishedTables t;
    const LabelScoreMapping m;
    for (const char* skill : {"Decision-making", "Communication", "Creativity"}) {
      CAPTURE(skill);
      const auto row = correlate_skill(t.labels, m, t.ratings, "ML-2022", "T1", skill);
      REQUIRE(row.r.has_value());
      CHECK(*row.r == doctest::Approx(oracle_cell("ML-2022", "T1", skill)).epsilon(1e-12));
    }
    const auto comm = correlate_skill(t.labels, m, t.ratings, "ML-2022", "T1", "Communication");
    CHECK(std::round(*comm.r * 100) / 100 == doctest::Approx(0.57));
    const auto crea = correlate_skill(t.labels, m, t.ratings, "ML-2022", "T1", "Creativity");
    CHECK(std::round(*crea.r * 100) / 100 == doctest::Approx(0.93));
  }

  TEST_CASE("every cell matches the oracle") {
    const PublishedTables t;
    const auto rows = correlate_all(t.labels, LabelScoreMapping(), t.ratings);
    CHECK(rows.size() == 21);
    for (const auto& row : rows) {
      CAPTURE(row.group + " " + row.task + " " + row.skill);
      REQUIRE(row.r.has_value());
      CHECK(*row.r == doctest::Approx(oracle_cell(row.group, row.task, row.skill)).epsilon(1e-12));
    }
  }

  TEST_CASE("unmatched students are reported, not guessed") {
    const auto labels = LabelsTable::from_csv(
        "group,student,Creativity:T1\nG,A1,L\nG,A2,M\nG,A3,H\nG,A4,M\n");
    const auto ratings = RatingsTable::from_csv(
        "group,student,task,grade\nG,A1,T1,50\nG,A2,T1,60\nG,A3,T1,90\nG,A9,T1,10\n");
    const auto row = correlate_skill(labels, LabelScoreMapping(), ratings, "G", "T1", "Creativity");
    CHECK(row.n == 3);
    CHECK(row.unrated == std::vector<std::string>{"A4"});
    CHECK(row.unlabeled == std::vector<std::string>{"A9"});
  }

  TEST_CASE("constant labels give n/a with a reason") {
    const auto labels = LabelsTable::from_csv("group,student,Creativity:T1\nG,A1,M\nG,A2,M\nG,A3,M\n");
    const auto ratings =
        RatingsTable::from_csv("group,student,task,grade\nG,A1,T1,50\nG,A2,T1,60\nG,A3,T1,90\n");
    const auto rows = correlate_all(labels, LabelScoreMapping(), ratings);
    REQUIRE(rows.size() == 1);
    CHECK_FALSE(rows[0].r.has_value());
    CHECK(rows[0].reason == "constant series");
    CHECK(correlations_to_csv(rows) == "group,task,skill,n,r\nG,T1,Creativity,3,n/a\n");
  }
}

TEST_SUITE("cohort table") {
  TEST_CASE("one student, one task") {
    auto model = std::make_shared<const GlmpModel>(
        test_support::load_model(test_support::fixtures() / "toy.glmp"));
    const auto trace = evaluate_network(model, {"X1", "T1", {{"Score", 0.9}}, {{"group", "G"}}});
    const auto table = cohort_table({trace});
    CHECK(table.to_csv() == "group,student,Overall:T1\nG,X1,H\n");
  }

  TEST_CASE("rows and tasks in natural order") {
    auto model = std::make_shared<const GlmpModel>(
        test_support::load_model(test_support::fixtures() / "toy.glmp"));
    std::vector<EvaluationTrace> traces;
    for (const char* s : {"A10", "A2"}) {
      for (const char* t : {"T10", "T2"}) {
        traces.push_back(evaluate_network(model, {s, t, {{"Score", 0.0}}, {{"group", "G"}}}));
      }
    }
    const auto table = cohort_table(traces);
    CHECK(table.to_csv() == "group,student,Overall:T2,Overall:T10\nG,A2,L,L\nG,A10,L,L\n");
  }
}
