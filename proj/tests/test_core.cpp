#include <doctest.h>

#include <random>

#include "icm/core.hpp"
#include "icm/error.hpp"
#include "support.hpp"

using namespace icm;
using namespace icm::test;

namespace {

ErrorKind kind_of(const SubjectRecord& r) {
  try {
    validate_record(r);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("validate_record accepts consistent records and names the violation otherwise") {
  CHECK_NOTHROW(validate_record(progression(1.2, 2.1)));

  auto missing = progression(1.2, 2.1);
  missing.t_pos.reset();
  CHECK(kind_of(missing) == ErrorKind::MismatchedEndpoint);

  auto extra = censored(1.0, 2.0);
  extra.t_trt = 1.5;
  CHECK(kind_of(extra) == ErrorKind::MismatchedEndpoint);

  CHECK(kind_of(progression(3.0, 2.1)) == ErrorKind::NonMonotoneTimes);
  CHECK(kind_of(censored(-0.5, 2.0)) == ErrorKind::NegativeTime);

  auto late_psa = censored(1.0, 2.0);
  late_psa.psa = {{0.0, 1.0}, {2.5, 1.1}};
  CHECK_THROWS_AS(validate_record(late_psa), Error);
}

TEST_CASE("classify_scenario on the documented window [1, 4)") {
  const EvaluationWindow w{1.0, 3.0};
  CHECK(classify_scenario(progression(1.5, 3.0), w) == ScenarioCode::S3a);
  CHECK(classify_scenario(progression(0.8, 2.0), w) == ScenarioCode::S1a);
  CHECK(classify_scenario(censored(4.2, 5.0), w) == ScenarioCode::S4c);
  CHECK(classify_scenario(censored(0.4, 0.9), w) == ScenarioCode::Excluded);

  CHECK(classify_scenario(treated(0.5, 2.0), w) == ScenarioCode::S1b);
  CHECK(classify_scenario(censored(0.5, 2.0), w) == ScenarioCode::S1c);
  CHECK(classify_scenario(progression(2.0, 6.0), w) == ScenarioCode::S2a);
  CHECK(classify_scenario(treated(2.0, 6.0), w) == ScenarioCode::S2b);
  CHECK(classify_scenario(censored(2.0, 6.0), w) == ScenarioCode::S2c);
  CHECK(classify_scenario(treated(1.5, 3.0), w) == ScenarioCode::S3b);
  CHECK(classify_scenario(censored(1.5, 3.0), w) == ScenarioCode::S3c);
  CHECK(classify_scenario(progression(4.0, 6.0), w) == ScenarioCode::S4a);
  CHECK(classify_scenario(treated(5.0, 6.0), w) == ScenarioCode::S4b);
  CHECK(classify_scenario(progression(0.5, 5.0), w) == ScenarioCode::S5a);
  CHECK(classify_scenario(treated(0.5, 5.0), w) == ScenarioCode::S5b);
  CHECK(classify_scenario(censored(0.5, 5.0), w) == ScenarioCode::S5c);
}

TEST_CASE("tie rule: t counts as inside, t + dt counts as outside") {
  const EvaluationWindow w{1.0, 3.0};
  CHECK(classify_scenario(progression(1.0, 3.0), w) == ScenarioCode::S3a);
  CHECK(classify_scenario(progression(0.5, 4.0), w) == ScenarioCode::S5a);
  CHECK(classify_scenario(progression(0.5, 1.0), w) == ScenarioCode::S1a);
  CHECK(classify_scenario(censored(4.0, 4.5), w) == ScenarioCode::S4c);
  CHECK(classify_scenario(censored(0.0, 1.0), w) == ScenarioCode::S1c);
}

TEST_CASE("scenario conditions partition randomized records") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 8.0);
  std::uniform_int_distribution<int> kind(0, 2);
  for (int i = 0; i < 20000; ++i) {
    const EvaluationWindow w{u(rng) * 0.5, 0.1 + u(rng) * 0.5};
    double a = u(rng);
    double b = u(rng);
    if (a > b) std::swap(a, b);
    if (a == b) continue;
    SubjectRecord r;
    switch (kind(rng)) {
      case 0: r = progression(a, b); break;
      case 1: r = treated(a, b); break;
      default: r = censored(a, b); break;
    }
    const double t = w.t;
    const double e = w.end();
    const char letter = r.delta == EventKind::Progression ? 'a' : r.delta == EventKind::Treatment ? 'b' : 'c';
    int matches = 0;
    std::string expected = "excluded";
    auto hit = [&](bool cond, const char* group) {
      if (!cond) return;
      ++matches;
      expected = std::string(group) + letter;
    };
    hit(b >= t && a < t && b < e, "1");
    hit(b >= t && a >= t && a < e && b >= e, "2");
    hit(b >= t && a >= t && b < e, "3");
    hit(b >= t && a >= e, "4");
    hit(b >= t && a < t && b >= e, "5");
    if (b < t) ++matches;
    REQUIRE(matches == 1);
    const auto code = classify_scenario(r, w);
    REQUIRE(std::string(to_string(code)) == expected);
    if (is_absolute_case(code)) CHECK((a >= t && b < e));
    if (is_absolute_control(code)) CHECK(a >= e);
  }
}

TEST_CASE("windows past the endpoint always exclude") {
  const auto r = censored(1.0, 2.5);
  for (double t : {2.6, 3.0, 10.0}) CHECK(classify_scenario(r, {t, 1.0}) == ScenarioCode::Excluded);
}

TEST_CASE("build_risk_set keeps endpoints >= t") {
  const EvaluationWindow w{1.0, 3.0};
  std::vector<SubjectRecord> recs = {censored(0.4, 0.9), progression(0.8, 2.0), censored(0.0, 1.0),
                                     treated(2.0, 6.0)};
  const auto rs = build_risk_set(recs, w);
  CHECK(rs.n_t() == 3);
  CHECK(rs.members[0].index == 1);
  CHECK(rs.members[1].index == 2);
  CHECK(rs.members[1].scenario == ScenarioCode::S1c);

  std::vector<SubjectRecord> none = {censored(0.1, 0.5), progression(0.2, 0.9)};
  try {
    build_risk_set(none, w);
    FAIL("expected EmptyRiskSet");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyRiskSet);
  }
}

TEST_CASE("make_window rejects non-positive horizons") {
  CHECK_THROWS_AS(make_window(1.0, 0.0), Error);
  CHECK_THROWS_AS(make_window(-1.0, 3.0), Error);
  CHECK(make_window(1.0, 3.0).end() == 4.0);
}
