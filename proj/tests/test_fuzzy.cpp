#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "glmp/fuzzy.hpp"
#include "support.hpp"

using namespace glmp;
using test_support::level_variable;
using test_support::random_cp;

namespace {

ComputationalPerception cp_of(std::initializer_list<double> w) {
  LabelVector v(static_cast<Eigen::Index>(w.size()));
  Eigen::Index i = 0;
  for (double x : w) v(i++) = x;
  return {level_variable(), v, LabelVector::Ones(v.size())};
}

void check_vector(const LabelVector& got, std::initializer_list<double> want) {
  REQUIRE(static_cast<std::size_t>(got.size()) == want.size());
  Eigen::Index i = 0;
  for (double w : want) CHECK(got(i++) == doctest::Approx(w).epsilon(1e-12));
}

// All rules of a complete rule base over `arity` inputs, consequent given by `f`.
std::vector<FuzzyRule> full_rules(std::size_t arity, std::size_t labels,
                                  const std::function<std::size_t(const std::vector<std::size_t>&)>& f) {
  std::vector<FuzzyRule> rules;
  std::vector<std::size_t> combo(arity, 0);
  while (true) {
    FuzzyRule r;
    for (std::size_t i = 0; i < arity; ++i) r.antecedents.emplace_back(i, combo[i]);
    r.consequent = f(combo);
    rules.push_back(r);
    std::size_t k = 0;
    while (k < arity && ++combo[k] == labels) combo[k++] = 0;
    if (k == arity) break;
  }
  return rules;
}

}  // namespace

TEST_SUITE("membership") {
  TEST_CASE("default partition anchors") {
    const auto var = level_variable();
    check_vector(fuzzify(0.0, var).validity, {1.0, 0.0, 0.0});
    check_vector(fuzzify(0.5, var).validity, {0.0, 1.0, 0.0});
    check_vector(fuzzify(0.25, var).validity, {0.5, 0.5, 0.0});
    check_vector(fuzzify(1.0, var).validity, {0.0, 0.0, 1.0});
  }

  TEST_CASE("partitions sum to one on a dense grid") {
    for (std::size_t n = 2; n <= kMaxLabels; ++n) {
      const auto fns = uniform_partition(n);
      CHECK(is_ruspini_partition(fns));
      for (int k = 0; k <= 10000; ++k) {
        const double z = k / 10000.0;
        double sum = 0.0;
        for (const auto& f : fns) sum += f.degree(z);
        REQUIRE(std::abs(sum - 1.0) <= 1e-9);
      }
    }
  }

  TEST_CASE("non-Ruspini partitions are rejected") {
    std::vector<MembershipFunction> gap{{0, 0, 0.4}, {0.6, 1, 1}};
    CHECK_FALSE(is_ruspini_partition(gap));
    CHECK_THROWS_AS(LinguisticVariable("v", {"Low", "High"}, gap, LabelVector::Ones(2)),
                    ModelError);
  }

  TEST_CASE("fuzzify rejects values outside the unit interval") {
    CHECK_THROWS_AS(fuzzify(1.5, level_variable(), "Gaze"), DomainError);
    CHECK_THROWS_AS(fuzzify(-0.1, level_variable()), DomainError);
    CHECK_THROWS_AS(fuzzify(std::nan(""), level_variable()), DomainError);
    try {
      fuzzify(2.0, level_variable(), "Gaze");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("Gaze") != std::string::npos);
    }
  }

  TEST_CASE("variables reject bad label sets") {
    CHECK_THROWS_AS(LinguisticVariable("v", {"Low"}), ModelError);
    CHECK_THROWS_AS(LinguisticVariable("v", {"Low", "low"}), ModelError);
    CHECK_THROWS_AS(LinguisticVariable("v", std::vector<std::string>(10, "x")), ModelError);
    CHECK_THROWS_AS(LinguisticVariable("v", {"Poor", "Good", "Great"}), ModelError);
  }
}

TEST_SUITE("rules") {
  TEST_CASE("speed rule for Low, Medium, High inputs") {
    // Full base built with the mean-label policy; (Low, Medium, High) must
    // give Medium.
    const auto rules = full_rules(3, 3, [](const std::vector<std::size_t>& c) {
      return static_cast<std::size_t>((c[0] + c[1] + c[2]) / 3.0 + 0.5);
    });
    const auto var = level_variable();
    const auto out = evaluate_rules({crisp(var, 0), crisp(var, 1), crisp(var, 2)}, rules, var);
    check_vector(out.validity, {0.0, 1.0, 0.0});
  }

  TEST_CASE("crisp inputs reproduce every row of a three-input table") {
    std::mt19937_64 rng(11);
    const auto var = level_variable();
    for (int trial = 0; trial < 20; ++trial) {
      std::map<std::vector<std::size_t>, std::size_t> table;
      std::uniform_int_distribution<std::size_t> pick(0, 2);
      const auto rules = full_rules(3, 3, [&](const std::vector<std::size_t>& c) {
        return table[c] = pick(rng);
      });
      for (const auto& [combo, want] : table) {
        const auto out = evaluate_rules(
            {crisp(var, combo[0]), crisp(var, combo[1]), crisp(var, combo[2])}, rules, var);
        for (std::size_t l = 0; l < 3; ++l) {
          REQUIRE(out.validity(static_cast<Eigen::Index>(l)) == (l == want ? 1.0 : 0.0));
        }
      }
    }
  }

  TEST_CASE("activation is monotone in antecedent validity") {
    std::mt19937_64 rng(12);
    const auto var = level_variable();
    std::uniform_int_distribution<std::size_t> pick(0, 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
      const auto rules = full_rules(2, 3, [&](const std::vector<std::size_t>&) { return pick(rng); });
      // Raw (unnormalized) activations via min/max.
      const auto activation = [&](const LabelVector& a, const LabelVector& b) {
        LabelVector act = LabelVector::Zero(3);
        for (const auto& r : rules) {
          const double s = std::min(a(static_cast<Eigen::Index>(r.antecedents[0].second)),
                                    b(static_cast<Eigen::Index>(r.antecedents[1].second)));
          auto& slot = act(static_cast<Eigen::Index>(r.consequent));
          slot = std::max(slot, s);
        }
        return act;
      };
      LabelVector a(3), b(3);
      for (int i = 0; i < 3; ++i) {
        a(i) = u(rng);
        b(i) = u(rng);
      }
      const LabelVector before = activation(a, b);
      LabelVector a2 = a;
      a2(static_cast<Eigen::Index>(pick(rng))) += u(rng);
      const LabelVector after = activation(a2, b);
      for (int i = 0; i < 3; ++i) REQUIRE(after(i) >= before(i));
    }
  }

  TEST_CASE("rule outputs are normalized") {
    std::mt19937_64 rng(13);
    const auto var = level_variable();
    std::uniform_int_distribution<std::size_t> pick(0, 2);
    for (int trial = 0; trial < 1000; ++trial) {
      const auto rules = full_rules(3, 3, [&](const std::vector<std::size_t>&) { return pick(rng); });
      const auto out = evaluate_rules({random_cp(rng, var), random_cp(rng, var), random_cp(rng, var)},
                                      rules, var);
      REQUIRE(std::abs(out.validity.sum() - 1.0) < 1e-9);
      REQUIRE(out.normalized());
    }
  }

  TEST_CASE("more than three inputs is refused") {
    const auto var = level_variable();
    std::vector<ComputationalPerception> four(4, crisp(var, 0));
    CHECK_THROWS_AS(evaluate_rules(four, {}, var), ModelError);
  }
}

TEST_SUITE("weighted average") {
  TEST_CASE("identical inputs are a fixed point") {
    const auto var = level_variable();
    std::vector<ComputationalPerception> four(4, crisp(var, 1));
    check_vector(evaluate_weighted(four, {1, 1, 1, 1}, var).validity, {0.0, 1.0, 0.0});
  }

  TEST_CASE("symmetric extremes meet in the middle") {
    const auto var = level_variable();
    check_vector(evaluate_weighted({crisp(var, 0), crisp(var, 2)}, {1, 1}, var).validity,
                 {0.0, 1.0, 0.0});
  }

  TEST_CASE("hand-computed weighted mean") {
    // (3*0 + 1 + 1 + 1) / 6 = 0.5
    const auto var = level_variable();
    const auto out = evaluate_weighted({crisp(var, 0), crisp(var, 2), crisp(var, 2), crisp(var, 2)},
                                       {3, 1, 1, 1}, var);
    check_vector(out.validity, {0.0, 1.0, 0.0});
    CHECK(select_label(out).rendered == "M");
  }

  TEST_CASE("scaling every weight leaves the output unchanged bit-for-bit") {
    std::mt19937_64 rng(14);
    const auto var = level_variable();
    std::uniform_real_distribution<double> w(0.01, 10.0), scale(1e-3, 1e3);
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<ComputationalPerception> in;
      std::vector<double> weights;
      const int n = 4 + trial % 4;
      for (int i = 0; i < n; ++i) {
        in.push_back(random_cp(rng, var));
        weights.push_back(w(rng));
      }
      const auto base = evaluate_weighted(in, weights, var);
      const double c = scale(rng);
      for (double& x : weights) x *= c;
      const auto scaled = evaluate_weighted(in, weights, var);
      REQUIRE(base.validity == scaled.validity);
    }
  }

  TEST_CASE("all-zero weights are a model error") {
    const auto var = level_variable();
    CHECK_THROWS_AS(evaluate_weighted({crisp(var, 0), crisp(var, 1)}, {0, 0}, var), ModelError);
  }
}

TEST_SUITE("label selection") {
  TEST_CASE("documented examples") {
    CHECK(select_label(cp_of({0, 0, 1})).rendered == "H");
    CHECK(select_label(cp_of({0.05, 0.45, 0.50}), 0.1).rendered == "M/H");
    CHECK(select_label(cp_of({0.5, 0.0, 0.5}), 0.1).rendered == "L");
    CHECK(select_label(cp_of({0.55, 0.45, 0.0}), 0.1).rendered == "L/M");
    CHECK(select_label(cp_of({0.6, 0.4, 0.0}), 0.1).rendered == "L");
  }

  TEST_CASE("half-step positions") {
    CHECK(select_label(cp_of({1, 0, 0})).half_step() == 0);
    CHECK(select_label(cp_of({0.5, 0.5, 0})).half_step() == 1);
    CHECK(select_label(cp_of({0, 0.45, 0.55})).half_step() == 3);
  }

  TEST_CASE("label text") {
    const auto var = level_variable();
    CHECK(label_text(*var, select_label(cp_of({0, 0.5, 0.5}))) == "Medium/High");
  }

  TEST_CASE("tiny order-preserving perturbations keep the outcome") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> d(-1e-13, 1e-13);
    const auto var = level_variable();
    for (int trial = 0; trial < 10000; ++trial) {
      const auto cp = random_cp(rng, var);
      auto moved = cp;
      for (Eigen::Index i = 0; i < moved.validity.size(); ++i) moved.validity(i) += d(rng);
      const auto a = select_label(cp), b = select_label(moved);
      REQUIRE(a.rendered == b.rendered);
    }
  }
}
