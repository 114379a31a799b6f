#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "icm/core.hpp"
#include "icm/predictor.hpp"

namespace icm {

/// Model-based probabilities of being a case (W) and a control (W') within
/// the window, both in [0, 1].
struct WeightPair {
  double case_w = 0.0;
  double control_w = 0.0;
  ScenarioCode scenario = ScenarioCode::Excluded;
  // A ratio denominator Pi(T+ | T-) fell below kDegenerateDenominator; the
  // affected weight was set to 0.
  bool degenerate = false;
};

inline constexpr double kDegenerateDenominator = 1e-12;

/// Both model-based weights for a risk-set member. Every Pi is conditioned on
/// the last negative biopsy time.
WeightPair model_weights(const SubjectRecord& record, const EvaluationWindow& window,
                         const RiskPredictor& predictor, const SubjectProfile& profile);

inline double model_case_weight(const SubjectRecord& record, const EvaluationWindow& window,
                                const RiskPredictor& predictor, const SubjectProfile& profile) {
  return model_weights(record, window, predictor, profile).case_w;
}

inline double model_control_weight(const SubjectRecord& record, const EvaluationWindow& window,
                                   const RiskPredictor& predictor, const SubjectProfile& profile) {
  return model_weights(record, window, predictor, profile).control_w;
}

/// Reverse Kaplan-Meier estimate of staying uncensored, landmarked at t:
/// G(s | t) = prod over censoring times u in (t, s] of (1 - d_u / n_u).
/// Only delta = 0 endpoints are jumps; progression/treatment endpoints leave
/// the risk set and, on ties, do so before the censorings at that instant.
class CensoringSurvival {
 public:
  CensoringSurvival() = default;
  CensoringSurvival(double landmark, std::vector<double> jump_times, std::vector<double> values,
                    std::vector<std::size_t> at_risk, std::vector<std::size_t> events);

  /// G(s | t); 1 for s <= t, right-continuous.
  double operator()(double s) const;

  double landmark() const { return landmark_; }
  const std::vector<double>& jump_times() const { return jump_times_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::size_t>& at_risk() const { return at_risk_; }
  const std::vector<std::size_t>& events() const { return events_; }

  /// True when there is no jump in (t, s].
  bool flat_until(double s) const { return (*this)(s) == 1.0; }

 private:
  double landmark_ = 0.0;
  std::vector<double> jump_times_;
  std::vector<double> values_;
  std::vector<std::size_t> at_risk_;
  std::vector<std::size_t> events_;
};

CensoringSurvival km_censoring_survival(std::span<const SubjectRecord> records, double landmark);

/// 1 / G(T+ | t) for an absolute case (t <= T- and T+ < t + dt, progression).
double ipcw_case_weight(const SubjectRecord& record, const CensoringSurvival& censoring,
                        const EvaluationWindow& window);

/// 1 / G(t + dt | t), shared by every absolute control.
double ipcw_control_weight(const CensoringSurvival& censoring, const EvaluationWindow& window);

}  // namespace icm
