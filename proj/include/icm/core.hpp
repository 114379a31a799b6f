#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace icm {

/// Observed event type. Encoded 0/1/2 in files; 0 is right censoring.
enum class EventKind : int { Censored = 0, Progression = 1, Treatment = 2 };

struct PsaObservation {
  double time = 0.0;   // years
  double value = 0.0;  // log2(PSA + 1)
};

/// One subject's observed data: a single risk interval (last negative biopsy,
/// then one of positive biopsy / treatment / censoring), baseline covariates
/// and the PSA series.
struct SubjectRecord {
  std::string id;
  double t_last_neg = 0.0;
  std::optional<double> t_pos;
  std::optional<double> t_trt;
  std::optional<double> t_cen;
  EventKind delta = EventKind::Censored;
  double age = 62.0;
  double density = 0.0;
  std::vector<PsaObservation> psa;

  /// The observed endpoint matching `delta`. Only meaningful on validated
  /// records; returns t_last_neg when the matching field is absent.
  double endpoint() const;
};

struct EvaluationWindow {
  double t = 1.0;
  double dt = 3.0;

  double end() const { return t + dt; }
};

EvaluationWindow make_window(double t, double dt);

enum class ScenarioCode {
  S1a, S1b, S1c,
  S2a, S2b, S2c,
  S3a, S3b, S3c,
  S4a, S4b, S4c,
  S5a, S5b, S5c,
  Excluded,
};

std::string_view to_string(ScenarioCode code);

inline bool is_absolute_case(ScenarioCode c) { return c == ScenarioCode::S3a; }
inline bool is_absolute_control(ScenarioCode c) {
  return c == ScenarioCode::S4a || c == ScenarioCode::S4b || c == ScenarioCode::S4c;
}

const SubjectRecord& validate_record(const SubjectRecord& record);

// Half-open window: a time equal to t counts as >= t, a time equal to t+dt
// counts as >= t+dt.
ScenarioCode classify_scenario(const SubjectRecord& record, const EvaluationWindow& window);

struct RiskSetMember {
  std::size_t index;  // position in the source record list
  ScenarioCode scenario;
};

/// Records still under observation at the landmark. Holds indices into the
/// record list it was built from; that list must outlive the risk set.
struct RiskSet {
  EvaluationWindow window;
  std::vector<RiskSetMember> members;

  std::size_t n_t() const { return members.size(); }
};

RiskSet build_risk_set(std::span<const SubjectRecord> records, const EvaluationWindow& window);

}  // namespace icm
