#include "icm/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "icm/error.hpp"

namespace icm {

int default_thread_count() {
  if (const char* env = std::getenv("ICM_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_thread_count(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

std::vector<double> predict_window_risks(std::span<const SubjectProfile> profiles, const RiskPredictor& predictor,
                                         const EvaluationWindow& window, Execution exec) {
  std::vector<double> out(profiles.size());
  for_each_index(profiles.size(), exec, [&](std::size_t i) {
    out[i] = predictor.cif(profiles[i], window.end(), window.t);
  });
  return out;
}

std::vector<WeightPair> compute_model_weights(const RiskSet& rs, std::span<const SubjectRecord> records,
                                              std::span<const SubjectProfile> profiles,
                                              const RiskPredictor& predictor, Execution exec) {
  if (records.size() != profiles.size()) throw Error(ErrorKind::InvalidArgument, "records/profiles length mismatch");
  std::vector<WeightPair> out(records.size());
  for_each_index(rs.members.size(), exec, [&](std::size_t j) {
    const auto i = rs.members[j].index;
    out[i] = model_weights(records[i], rs.window, predictor, profiles[i]);
  });
  return out;
}

std::vector<double> compute_epce_probabilities(const RiskSet& rs, std::span<const SubjectRecord> records,
                                               std::span<const SubjectProfile> profiles,
                                               const RiskPredictor& predictor, const QuadratureRule& rule,
                                               Execution exec) {
  if (records.size() != profiles.size()) throw Error(ErrorKind::InvalidArgument, "records/profiles length mismatch");
  std::vector<double> out(rs.members.size());
  for_each_index(rs.members.size(), exec, [&](std::size_t j) {
    const auto i = rs.members[j].index;
    out[j] = epce_probability(records[i], profiles[i], predictor, rs.window, rule);
  });
  return out;
}

std::vector<double> compute_reference_epce_probabilities(std::span<const TrueOutcome> truth,
                                                         std::span<const SubjectProfile> profiles,
                                                         const RiskPredictor& predictor,
                                                         const EvaluationWindow& window, Execution exec) {
  if (truth.size() != profiles.size()) throw Error(ErrorKind::InvalidArgument, "truth/profiles length mismatch");
  std::vector<std::size_t> at_risk;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (std::min(truth[i].t_prg_star, truth[i].t_trt_star) >= window.t) at_risk.push_back(i);
  }
  std::vector<double> out(at_risk.size());
  for_each_index(at_risk.size(), exec, [&](std::size_t j) {
    const auto i = at_risk[j];
    out[j] = epce_reference_probability(truth[i], profiles[i], predictor, window);
  });
  return out;
}

}  // namespace icm
