#include <cmath>

#include "doctest.h"
#include "jm/al_miner.hpp"
#include "jm/hybrid.hpp"
#include "jm/pm_miner.hpp"

using namespace jm::hybrid;
using jm::LogStats;

// Reference values below were computed independently with Python's math module.

TEST_CASE("coefficients from the alphabet") {
  const auto c = HybridConfig::for_alphabet(6);
  CHECK(c.c0 == 6.0);
  CHECK(c.c1 == 60.0);
  CHECK(c.c2 == doctest::Approx(1.0 / 600.0));
  CHECK_THROWS_AS(HybridConfig::for_alphabet(0), std::invalid_argument);
  CHECK_THROWS_AS((HybridConfig{1.0, 0.0, 1.0, 2}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((HybridConfig{1.0, 1.0, 1.0, -1}.validate()), std::invalid_argument);
}

TEST_CASE("lambda") {
  CHECK(lambda_approx({80, 1, 6, 0}, HybridConfig::for_alphabet(6)) == 0.0);
  CHECK(lambda_approx({80, 10, 6, 0}, HybridConfig::for_alphabet(6)) == doctest::Approx(0.075));
  CHECK(lambda_approx({33, 33, 25, 0}, HybridConfig::for_alphabet(25)) == doctest::Approx(1.15041).epsilon(1e-5));
  CHECK(lambda_approx({5053, 5053, 18, 0}, HybridConfig::for_alphabet(18)) == doctest::Approx(0.013193).epsilon(1e-4));
  CHECK_THROWS_AS(lambda_approx({0, 0, 6, 0}, HybridConfig::for_alphabet(6)), std::invalid_argument);
}

TEST_CASE("alpha") {
  const auto c6 = HybridConfig::for_alphabet(6);
  CHECK(alpha_approx({80, 10, 6, 0}, c6) == doctest::Approx(0.491667).epsilon(1e-5));
  CHECK(round_to(alpha_approx({80, 10, 6, 0}, c6), 2) == 0.49);
  CHECK(alpha_approx({60, 10, 6, 0}, c6) == doctest::Approx(0.5));
  CHECK(alpha_approx({33, 33, 25, 0}, HybridConfig::for_alphabet(25)) == doctest::Approx(0.521687).epsilon(1e-5));
  CHECK(alpha_approx({5053, 5053, 18, 0}, HybridConfig::for_alphabet(18)) == doctest::Approx(0.062555).epsilon(1e-4));
  // Tail of the sigmoid: with a steep slope, ten times the inflection point is near zero.
  const HybridConfig steep{6.0, 60.0, 0.01, 2};
  CHECK(alpha_approx({600, 10, 6, 0}, steep) < 0.01);
  double prev = 1.0;
  for (std::size_t n = 1; n < 5000; n += 37) {
    const double a = alpha_approx({n, 1, 6, 0}, c6);
    CHECK(a > 0.0);
    CHECK(a < prev);
    prev = a;
  }
}

TEST_CASE("rounding") {
  CHECK(round_to(0.49167, 2) == 0.49);
  CHECK(round_to(0.495, 1) == 0.5);
  CHECK(round_to(1.15041, 2) == 1.15);
}

TEST_CASE("decide") {
  const auto grep = decide({33, 33, 25, 0}, HybridConfig::for_alphabet(25));
  CHECK(grep.chosen == Engine::pm);
  CHECK(round_to(grep.lambda_value, 2) == 1.15);
  CHECK(round_to(grep.alpha_value, 2) == 0.52);

  for (std::size_t v : {1u, 2u, 100u, 5053u}) CHECK(decide({5053, v, 18, 0}, HybridConfig::for_alphabet(18)).chosen == Engine::al);

  const auto one = decide({50, 1, 4, 0}, HybridConfig::for_alphabet(4));
  CHECK(one.chosen == Engine::al);
  CHECK(one.degenerate);

  CHECK(decide({10, 10, 20, 0}, HybridConfig::for_alphabet(20)).chosen == Engine::pm);
  CHECK(decide({1000, 1000, 20, 0}, HybridConfig::for_alphabet(20)).chosen == Engine::al);
}

TEST_CASE("hybrid_learn dispatches") {
  std::vector<jm::Trace> traces;
  for (int i = 0; i < 10; ++i) {
    jm::Trace t;
    for (int j = 0; j <= i; ++j) t.push_back("e" + std::to_string(j));
    traces.push_back(t);
  }
  const jm::EventLog log(traces);
  const auto r = hybrid_learn(log);
  CHECK(r.decision.chosen == Engine::pm);
  CHECK(r.model == jm::pm::mine_pm_uj(log).model);

  const jm::EventLog single(jm::EventLog::VariantMap{{{"a", "b"}, 40}});
  const auto s = hybrid_learn(single);
  CHECK(s.decision.chosen == Engine::al);
  CHECK(s.model == jm::al::mine_al(single, jm::al::AlSetup::uj()).model);
  CHECK(to_decision_json(s.decision).find("\"al\"") != std::string::npos);
}
