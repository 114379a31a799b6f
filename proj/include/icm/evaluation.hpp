#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "icm/core.hpp"
#include "icm/kernels.hpp"
#include "icm/metrics.hpp"
#include "icm/predictor.hpp"

namespace icm {

struct EvaluationRequest {
  EvaluationWindow window;
  bool model = true;
  bool ipcw = true;
  bool naive = true;
  bool reference = false;
  bool epce = false;
  Execution exec = Execution::Parallel;
  QuadratureRule rule;
};

/// Parses a comma-separated subset of {model, ipcw, naive, reference, epce}.
void set_approaches(EvaluationRequest& req, const std::string& list);

/// One report per requested approach, in the order model, ipcw, naive,
/// reference. Missing case/control mass leaves the affected field empty with
/// a note; an empty risk set throws. `truth` is required for reference.
std::vector<MetricsReport> evaluate_dataset(std::span<const SubjectRecord> records,
                                            std::span<const SubjectProfile> profiles,
                                            const std::vector<TrueOutcome>* truth, const RiskPredictor& predictor,
                                            const EvaluationRequest& request);

struct ApproachSummary {
  Approach approach = Approach::Model;
  std::size_t n_auc = 0;
  std::size_t n_brier = 0;
  double mean_auc = 0.0;
  double sd_auc = 0.0;
  double rmse_auc = 0.0;  // against the reference value of the same replicate
  double mean_brier = 0.0;
  double sd_brier = 0.0;
  double rmse_brier = 0.0;
};

struct EpceSummary {
  std::size_t n = 0;
  double mean_model = 0.0;
  double sd_model = 0.0;
  double mean_reference = 0.0;
  double sd_reference = 0.0;
  double rmse = 0.0;
};

struct ComparisonSummary {
  std::vector<std::vector<MetricsReport>> replicates;
  std::vector<ApproachSummary> approaches;
  std::optional<EpceSummary> epce;
};

/// Every replicate must contain a reference report.
ComparisonSummary summarize_replicates(std::vector<std::vector<MetricsReport>> replicates);

}  // namespace icm
