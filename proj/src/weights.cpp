#include "icm/weights.hpp"

#include <algorithm>
#include <map>

#include "icm/error.hpp"

namespace icm {

namespace {

double unit(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

WeightPair model_weights(const SubjectRecord& rec, const EvaluationWindow& w, const RiskPredictor& pred,
                         const SubjectProfile& prof) {
  WeightPair out;
  out.scenario = classify_scenario(rec, w);
  const double lneg = rec.t_last_neg;
  const double end = rec.endpoint();
  const double t = w.t;
  const double b = w.end();
  auto pi = [&](double s) { return pred.cif(prof, s, lneg); };

  // Ratio against Pi(T+ | T-); zero weight when the detected interval is
  // (numerically) impossible under the predictor.
  auto ratio = [&](double num, double den) {
    if (den < kDegenerateDenominator) {
      out.degenerate = true;
      return 0.0;
    }
    return unit(num / den);
  };

  using S = ScenarioCode;
  switch (out.scenario) {
    case S::S1a: {
      const double pe = pi(end);
      out.case_w = ratio(pe - pi(t), pe);
      break;
    }
    case S::S1b:
      out.case_w = unit(pi(end) - pi(t));
      break;
    case S::S1c:
      out.case_w = unit(pi(b) - pi(t));
      out.control_w = unit(pred.surv(prof, b, lneg));
      break;
    case S::S2a: {
      const double pe = pi(end);
      const double pb = pi(b);
      out.case_w = ratio(pb, pe);
      out.control_w = ratio(pe - pb, pe);
      break;
    }
    case S::S2b:
    case S::S2c: {
      const double pb = pi(b);
      out.case_w = unit(pb);
      out.control_w = unit(1.0 - pb);
      break;
    }
    case S::S3a:
      out.case_w = 1.0;
      break;
    case S::S3b:
      out.case_w = unit(pi(end));
      break;
    case S::S3c:
      out.case_w = unit(pi(b));
      out.control_w = unit(pred.surv(prof, b, lneg));
      break;
    case S::S4a:
    case S::S4b:
    case S::S4c:
      out.control_w = 1.0;
      break;
    case S::S5a: {
      const double pe = pi(end);
      const double pb = pi(b);
      out.case_w = ratio(pb - pi(t), pe);
      out.control_w = ratio(pe - pb, pe);
      break;
    }
    case S::S5b:
    case S::S5c: {
      const double pb = pi(b);
      out.case_w = unit(pb - pi(t));
      out.control_w = unit(1.0 - pb);
      break;
    }
    case S::Excluded:
      break;
  }
  return out;
}

CensoringSurvival::CensoringSurvival(double landmark, std::vector<double> jump_times, std::vector<double> values,
                                     std::vector<std::size_t> at_risk, std::vector<std::size_t> events)
    : landmark_(landmark),
      jump_times_(std::move(jump_times)),
      values_(std::move(values)),
      at_risk_(std::move(at_risk)),
      events_(std::move(events)) {}

double CensoringSurvival::operator()(double s) const {
  if (s <= landmark_) return 1.0;
  const auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), s);
  if (it == jump_times_.begin()) return 1.0;
  return values_[static_cast<std::size_t>(it - jump_times_.begin()) - 1];
}

CensoringSurvival km_censoring_survival(std::span<const SubjectRecord> records, double landmark) {
  std::vector<const SubjectRecord*> at_t;
  for (const auto& r : records) {
    if (r.endpoint() >= landmark) at_t.push_back(&r);
  }
  if (at_t.empty()) {
    throw Error(ErrorKind::EmptyRiskSet, "no subject at risk for the censoring estimator at t=" + std::to_string(landmark));
  }
  std::map<double, std::size_t> censored_at;
  for (const auto* r : at_t) {
    if (r->delta == EventKind::Censored && r->endpoint() > landmark) ++censored_at[r->endpoint()];
  }
  std::vector<double> ends;
  ends.reserve(at_t.size());
  for (const auto* r : at_t) ends.push_back(r->endpoint());
  std::sort(ends.begin(), ends.end());

  std::vector<double> times, values;
  std::vector<std::size_t> at_risk, events;
  double g = 1.0;
  for (const auto& [u, d] : censored_at) {
    // Still at risk: endpoint after u, plus the censorings at u itself.
    const auto after = static_cast<std::size_t>(ends.end() - std::upper_bound(ends.begin(), ends.end(), u));
    const std::size_t n = after + d;
    g *= 1.0 - static_cast<double>(d) / static_cast<double>(n);
    times.push_back(u);
    values.push_back(g);
    at_risk.push_back(n);
    events.push_back(d);
  }
  return {landmark, std::move(times), std::move(values), std::move(at_risk), std::move(events)};
}

double ipcw_case_weight(const SubjectRecord& rec, const CensoringSurvival& cens, const EvaluationWindow& w) {
  if (!is_absolute_case(classify_scenario(rec, w))) {
    throw Error(ErrorKind::NotAbsoluteCase, "subject '" + rec.id + "' is not an absolute case");
  }
  const double g = cens(rec.endpoint());
  if (!(g > 0.0)) throw Error(ErrorKind::ZeroSurvival, "G(T+ | t) = 0 for subject '" + rec.id + "'");
  return 1.0 / g;
}

double ipcw_control_weight(const CensoringSurvival& cens, const EvaluationWindow& w) {
  const double g = cens(w.end());
  if (!(g > 0.0)) throw Error(ErrorKind::ZeroSurvival, "G(t + dt | t) = 0");
  return 1.0 / g;
}

}  // namespace icm
