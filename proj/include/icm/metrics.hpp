#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "icm/core.hpp"
#include "icm/predictor.hpp"
#include "icm/weights.hpp"

namespace icm {

// Conventions for this header: `risks`, `weights` and `profiles` are aligned
// with the record list the RiskSet was built from (entry i belongs to record
// i); entries of records outside the risk set are ignored.

struct RocCurve {
  std::vector<double> thresholds;  // descending, starts above 1, ends at 0
  std::vector<double> sens;
  std::vector<double> one_minus_spec;
};

struct RocResult {
  RocCurve curve;
  double auc = 0.0;
};

/// Sentinel threshold above every admissible risk.
inline constexpr double kThresholdAboveOne = 1.0 + 1e-9;

double weighted_sensitivity(std::span<const double> risks, std::span<const double> case_w, double c);
double weighted_specificity(std::span<const double> risks, std::span<const double> control_w, double c);

/// ROC over the grid {above-one sentinel} U unique risks U {0}, AUC by the
/// trapezoidal rule over 1 - specificity. Throws NoCaseMass / NoControlMass.
RocResult weighted_roc(std::span<const double> risks, std::span<const double> case_w,
                       std::span<const double> control_w);

/// Same grid and integration, but built from arbitrary sensitivity and
/// specificity functions of the threshold.
RocResult roc_and_auc(const std::function<double(double)>& sens, const std::function<double(double)>& spec,
                      std::span<const double> risks);

// Model-based approach.
double sensitivity_model(const RiskSet& rs, std::span<const double> risks, std::span<const WeightPair> weights,
                         double c);
double specificity_model(const RiskSet& rs, std::span<const double> risks, std::span<const WeightPair> weights,
                         double c);
/// (1/n_t) sum [(1 - pi)^2 W + pi^2 W'].
double brier_model(const RiskSet& rs, std::span<const double> risks, std::span<const WeightPair> weights);

// IPCW approach: absolute cases weighted 1/G(T+ | t), absolute controls 1/G(t+dt | t).
struct IpcwWeights {
  std::vector<double> case_w;     // aligned with records
  std::vector<double> control_w;  // aligned with records
  std::size_t dropped = 0;        // absolute cases with G(T+ | t) = 0
};

IpcwWeights ipcw_weights(const RiskSet& rs, std::span<const SubjectRecord> records,
                         const CensoringSurvival& censoring);

double sensitivity_ipcw(const RiskSet& rs, std::span<const SubjectRecord> records, std::span<const double> risks,
                        const CensoringSurvival& censoring, double c);
/// Unweighted fraction of absolute controls below c (the uniform weights cancel).
double specificity_ipcw(const RiskSet& rs, std::span<const double> risks, double c);
double brier_ipcw(const RiskSet& rs, std::span<const SubjectRecord> records, std::span<const double> risks,
                  const CensoringSurvival& censoring);

/// Unweighted case/control split that takes the detection time at face value.
struct LabelledMetrics {
  RocResult roc;
  double brier = 0.0;
  std::size_t n = 0;         // subjects entering the Brier denominator
  std::size_t cases = 0;
  std::size_t controls = 0;
};

LabelledMetrics naive_metrics(const RiskSet& rs, std::span<const SubjectRecord> records,
                              std::span<const double> risks);

/// Hidden event times; only a simulator can provide them.
struct TrueOutcome {
  double t_prg_star = 0.0;
  double t_trt_star = 0.0;
};

/// Metrics with exact labels: risk set min(T*, Ttrt*) >= t, cases progress in
/// [t, t+dt) before treatment, controls are event-free through t+dt. The Brier
/// denominator is the whole risk set, so treatment-first subjects inside the
/// window count as zero-loss members.
LabelledMetrics reference_metrics(std::span<const TrueOutcome> truth, std::span<const double> risks,
                                  const EvaluationWindow& window);

struct EpceResult {
  double value = 0.0;
  std::size_t n_t = 0;
  std::size_t contributing = 0;
  std::size_t excluded = 0;  // zero predictive probability, left out of the mean
};

/// Per-subject predictive probability of the observed window data,
/// d1 * F1 + d2 * F2, or 0 when the subject carries no contribution.
double epce_probability(const SubjectRecord& record, const SubjectProfile& profile, const RiskPredictor& predictor,
                        const EvaluationWindow& window, const QuadratureRule& rule = {});

double epce_reference_probability(const TrueOutcome& truth, const SubjectProfile& profile,
                                  const RiskPredictor& predictor, const EvaluationWindow& window);

/// Mean of -log p over subjects with p > 0. Throws EmptyRiskSet or
/// AllContributionsDegenerate.
EpceResult epce_from_probabilities(std::span<const double> probabilities, std::size_t n_t);

EpceResult epce_model(const RiskSet& rs, std::span<const SubjectRecord> records,
                      std::span<const SubjectProfile> profiles, const RiskPredictor& predictor,
                      const QuadratureRule& rule = {});

EpceResult epce_reference(std::span<const TrueOutcome> truth, std::span<const SubjectProfile> profiles,
                          const RiskPredictor& predictor, const EvaluationWindow& window);

enum class Approach { Model, Ipcw, Naive, Reference };

std::string_view to_string(Approach a);
std::optional<Approach> approach_from_string(std::string_view s);

struct Diagnostics {
  std::size_t dropped_subjects = 0;
  std::size_t degenerate_denominators = 0;
  std::size_t epce_excluded = 0;
  std::size_t epce_contributing = 0;
  std::vector<std::string> notes;
};

struct MetricsReport {
  EvaluationWindow window;
  Approach approach = Approach::Model;
  std::optional<double> auc;
  std::optional<double> brier;
  std::optional<double> epce;
  std::size_t n_t = 0;
  double case_mass = 0.0;
  double control_mass = 0.0;
  Diagnostics diagnostics;
  RocCurve roc;
};

}  // namespace icm
