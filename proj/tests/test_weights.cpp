#include <doctest.h>

#include <cmath>
#include <random>

#include "icm/error.hpp"
#include "icm/weights.hpp"
#include "support.hpp"

using namespace icm;
using namespace icm::test;

namespace {

const EvaluationWindow kWindow{1.0, 3.0};
const ConstantHazardPredictor kPred(0.2, 0.1);
const SubjectProfile kProfile{};

double pi(double s, double r) { return cp_cif(0.2, 0.1, s, r); }

}  // namespace

TEST_CASE("model weights for absolute groups") {
  auto w = model_weights(progression(1.5, 3.0), kWindow, kPred, kProfile);
  CHECK(w.scenario == ScenarioCode::S3a);
  CHECK(w.case_w == 1.0);
  CHECK(w.control_w == 0.0);
  w = model_weights(treated(5.0, 6.0), kWindow, kPred, kProfile);
  CHECK(w.case_w == 0.0);
  CHECK(w.control_w == 1.0);
  w = model_weights(progression(4.5, 6.0), kWindow, kPred, kProfile);
  CHECK(w.control_w == 1.0);
}

TEST_CASE("model weights against closed-form Pi") {
  auto w = model_weights(treated(2.0, 6.0), kWindow, kPred, kProfile);
  CHECK(w.scenario == ScenarioCode::S2b);
  CHECK(w.case_w == doctest::Approx(0.3007923).epsilon(1e-6));
  CHECK(w.control_w == doctest::Approx(1.0 - 0.3007923).epsilon(1e-6));

  w = model_weights(progression(0.5, 2.0), kWindow, kPred, kProfile);
  CHECK(w.scenario == ScenarioCode::S1a);
  CHECK(pi(2.0, 0.5) == doctest::Approx(0.2415812).epsilon(1e-6));
  CHECK(pi(1.0, 0.5) == doctest::Approx(0.0928613).epsilon(1e-6));
  CHECK(w.case_w == doctest::Approx(0.6156103).epsilon(1e-6));
  CHECK(w.control_w == 0.0);

  w = model_weights(censored(1.5, 3.0), kWindow, kPred, kProfile);
  CHECK(w.scenario == ScenarioCode::S3c);
  CHECK(w.case_w == doctest::Approx(pi(4.0, 1.5)));
  CHECK(w.control_w == doctest::Approx(std::exp(-0.75)).epsilon(1e-9));
  CHECK(w.control_w == doctest::Approx(0.472367).epsilon(1e-6));

  w = model_weights(treated(1.5, 3.0), kWindow, kPred, kProfile);
  CHECK(w.case_w == doctest::Approx(pi(3.0, 1.5)));
  CHECK(w.control_w == 0.0);

  w = model_weights(censored(0.5, 2.0), kWindow, kPred, kProfile);
  CHECK(w.scenario == ScenarioCode::S1c);
  CHECK(w.case_w == doctest::Approx(pi(4.0, 0.5) - pi(1.0, 0.5)));
  CHECK(w.control_w == doctest::Approx(cp_surv(0.2, 0.1, 4.0, 0.5)));

  w = model_weights(treated(0.5, 2.0), kWindow, kPred, kProfile);
  CHECK(w.case_w == doctest::Approx(pi(2.0, 0.5) - pi(1.0, 0.5)));

  w = model_weights(progression(2.0, 6.0), kWindow, kPred, kProfile);
  CHECK(w.scenario == ScenarioCode::S2a);
  CHECK(w.case_w == doctest::Approx(pi(4.0, 2.0) / pi(6.0, 2.0)));
  CHECK(w.control_w == doctest::Approx((pi(6.0, 2.0) - pi(4.0, 2.0)) / pi(6.0, 2.0)));

  w = model_weights(progression(0.5, 5.0), kWindow, kPred, kProfile);
  CHECK(w.scenario == ScenarioCode::S5a);
  CHECK(w.case_w == doctest::Approx((pi(4.0, 0.5) - pi(1.0, 0.5)) / pi(5.0, 0.5)));
  CHECK(w.control_w == doctest::Approx((pi(5.0, 0.5) - pi(4.0, 0.5)) / pi(5.0, 0.5)));

  w = model_weights(censored(0.5, 5.0), kWindow, kPred, kProfile);
  CHECK(w.case_w == doctest::Approx(pi(4.0, 0.5) - pi(1.0, 0.5)));
  CHECK(w.control_w == doctest::Approx(1.0 - pi(4.0, 0.5)));
  CHECK(w.case_w + w.control_w == doctest::Approx(1.0 - pi(1.0, 0.5)));
}

TEST_CASE("weight identities over randomized records") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 9.0);
  std::uniform_real_distribution<double> lam(0.02, 1.5);
  std::uniform_int_distribution<int> kind(0, 2);
  for (int i = 0; i < 3000; ++i) {
    const ConstantHazardPredictor pred(lam(rng), lam(rng));
    double a = u(rng);
    double b = a + 0.01 + u(rng) * 0.5;
    SubjectRecord r = kind(rng) == 0 ? progression(a, b) : kind(rng) == 1 ? treated(a, b) : censored(a, b);
    const EvaluationWindow w{0.5 + u(rng) * 0.3, 0.5 + u(rng) * 0.4};
    if (classify_scenario(r, w) == ScenarioCode::Excluded) continue;
    const auto wp = model_weights(r, w, pred, kProfile);
    REQUIRE(wp.case_w >= 0.0);
    REQUIRE(wp.case_w <= 1.0);
    REQUIRE(wp.control_w >= 0.0);
    REQUIRE(wp.control_w <= 1.0);
    REQUIRE(wp.case_w + wp.control_w <= 1.0 + 1e-12);
    if (wp.scenario == ScenarioCode::S2a || wp.scenario == ScenarioCode::S2b) {
      CHECK(wp.case_w + wp.control_w == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("a vanishing denominator yields zero weight and a flag") {
  const ConstantHazardPredictor tiny(1e-300, 0.5);
  const auto w = model_weights(progression(0.5, 2.0), kWindow, tiny, kProfile);
  CHECK(w.degenerate);
  CHECK(w.case_w == 0.0);
}

TEST_CASE("reverse Kaplan-Meier with one censoring") {
  std::vector<SubjectRecord> recs = {censored(1.0, 2.0), progression(1.5, 3.0), progression(1.2, 5.0),
                                     treated(1.1, 6.0), censored(0.1, 0.5)};
  const auto g = km_censoring_survival(recs, 1.0);
  CHECK(g(1.5) == 1.0);
  CHECK(g(2.0) == doctest::Approx(0.75));
  CHECK(g(3.0) == doctest::Approx(0.75));
  CHECK(g.at_risk().front() == 4);
  CHECK(ipcw_case_weight(recs[1], g, kWindow) == doctest::Approx(4.0 / 3.0));
  CHECK(ipcw_control_weight(g, kWindow) == doctest::Approx(4.0 / 3.0));
  try {
    ipcw_case_weight(recs[2], g, kWindow);
    FAIL("expected NotAbsoluteCase");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotAbsoluteCase);
  }
}

TEST_CASE("reverse Kaplan-Meier edge cases") {
  std::vector<SubjectRecord> no_cens = {progression(1.5, 3.0), treated(1.0, 2.0)};
  const auto g = km_censoring_survival(no_cens, 1.0);
  CHECK(g(100.0) == 1.0);
  CHECK(ipcw_case_weight(no_cens[0], g, kWindow) == 1.0);

  std::vector<SubjectRecord> last = {progression(1.5, 3.0), censored(1.0, 7.0)};
  const auto h = km_censoring_survival(last, 1.0);
  CHECK(h(6.99) == 1.0);
  CHECK(h(7.0) == 0.0);

  // Events leave before censorings at the same instant.
  std::vector<SubjectRecord> tie = {progression(1.5, 2.0), censored(1.0, 2.0), censored(1.0, 4.0)};
  const auto k = km_censoring_survival(tie, 1.0);
  CHECK(k(2.0) == doctest::Approx(0.5));

  std::vector<SubjectRecord> gone = {censored(0.1, 0.5)};
  CHECK_THROWS_AS(km_censoring_survival(gone, 1.0), Error);
}

TEST_CASE("zero censoring survival drops the case") {
  std::vector<SubjectRecord> recs = {censored(1.0, 2.0), progression(1.5, 2.0)};
  const auto g = km_censoring_survival(recs, 1.0);
  CHECK(g(2.0) == 0.0);
  try {
    ipcw_case_weight(recs[1], g, kWindow);
    FAIL("expected ZeroSurvival");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroSurvival);
  }
}
