#include "icm/core.hpp"

#include <cmath>

#include "icm/error.hpp"

namespace icm {

double SubjectRecord::endpoint() const {
  switch (delta) {
    case EventKind::Progression: return t_pos.value_or(t_last_neg);
    case EventKind::Treatment: return t_trt.value_or(t_last_neg);
    case EventKind::Censored: return t_cen.value_or(t_last_neg);
  }
  return t_last_neg;
}

EvaluationWindow make_window(double t, double dt) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorKind::InvalidArgument, "window start t must be >= 0");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::InvalidArgument, "window length dt must be > 0");
  }
  return {t, dt};
}

std::string_view to_string(ScenarioCode code) {
  switch (code) {
    case ScenarioCode::S1a: return "1a";
    case ScenarioCode::S1b: return "1b";
    case ScenarioCode::S1c: return "1c";
    case ScenarioCode::S2a: return "2a";
    case ScenarioCode::S2b: return "2b";
    case ScenarioCode::S2c: return "2c";
    case ScenarioCode::S3a: return "3a";
    case ScenarioCode::S3b: return "3b";
    case ScenarioCode::S3c: return "3c";
    case ScenarioCode::S4a: return "4a";
    case ScenarioCode::S4b: return "4b";
    case ScenarioCode::S4c: return "4c";
    case ScenarioCode::S5a: return "5a";
    case ScenarioCode::S5b: return "5b";
    case ScenarioCode::S5c: return "5c";
    case ScenarioCode::Excluded: return "excluded";
  }
  return "?";
}

namespace {

const char* endpoint_field(EventKind delta) {
  switch (delta) {
    case EventKind::Progression: return "t_pos";
    case EventKind::Treatment: return "t_trt";
    case EventKind::Censored: return "t_cen";
  }
  return "?";
}

}  // namespace

const SubjectRecord& validate_record(const SubjectRecord& r) {
  const std::string who = "subject '" + r.id + "': ";
  const int present = int(r.t_pos.has_value()) + int(r.t_trt.has_value()) + int(r.t_cen.has_value());
  const bool matches = (r.delta == EventKind::Progression && r.t_pos) ||
                       (r.delta == EventKind::Treatment && r.t_trt) ||
                       (r.delta == EventKind::Censored && r.t_cen);
  if (present != 1 || !matches) {
    throw Error(ErrorKind::MismatchedEndpoint,
                who + "delta=" + std::to_string(int(r.delta)) + " requires exactly field " +
                    endpoint_field(r.delta));
  }
  const double end = r.endpoint();
  if (!std::isfinite(r.t_last_neg) || !std::isfinite(end)) {
    throw Error(ErrorKind::NonMonotoneTimes, who + "non-finite time");
  }
  if (r.t_last_neg < 0.0) throw Error(ErrorKind::NegativeTime, who + "t_last_neg < 0");
  if (end < 0.0) throw Error(ErrorKind::NegativeTime, who + std::string(endpoint_field(r.delta)) + " < 0");
  if (!(r.t_last_neg < end)) {
    throw Error(ErrorKind::NonMonotoneTimes,
                who + "t_last_neg must precede " + endpoint_field(r.delta));
  }
  for (std::size_t i = 0; i < r.psa.size(); ++i) {
    const double ti = r.psa[i].time;
    if (ti < 0.0) throw Error(ErrorKind::NegativeTime, who + "psa time < 0");
    if (i > 0 && !(ti > r.psa[i - 1].time)) {
      throw Error(ErrorKind::NonMonotoneTimes, who + "psa times must be strictly increasing");
    }
    if (ti > end) throw Error(ErrorKind::NonMonotoneTimes, who + "psa time after endpoint");
  }
  return r;
}

ScenarioCode classify_scenario(const SubjectRecord& r, const EvaluationWindow& w) {
  const double end = r.endpoint();
  const double lo = w.t;
  const double hi = w.end();
  if (end < lo) return ScenarioCode::Excluded;

  // Offsets: 0 = progression (a), 1 = treatment (b), 2 = censored (c).
  const int k = r.delta == EventKind::Progression ? 0 : r.delta == EventKind::Treatment ? 1 : 2;
  auto pick = [k](ScenarioCode a) { return static_cast<ScenarioCode>(static_cast<int>(a) + k); };

  if (r.t_last_neg >= hi) return pick(ScenarioCode::S4a);
  if (r.t_last_neg < lo) return end < hi ? pick(ScenarioCode::S1a) : pick(ScenarioCode::S5a);
  return end < hi ? pick(ScenarioCode::S3a) : pick(ScenarioCode::S2a);
}

RiskSet build_risk_set(std::span<const SubjectRecord> records, const EvaluationWindow& window) {
  RiskSet rs{window, {}};
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ScenarioCode code = classify_scenario(records[i], window);
    if (code != ScenarioCode::Excluded) rs.members.push_back({i, code});
  }
  if (rs.members.empty()) {
    throw Error(ErrorKind::EmptyRiskSet, "no subject under observation at t=" + std::to_string(window.t));
  }
  return rs;
}

}  // namespace icm
