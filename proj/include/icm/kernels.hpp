#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

#include "icm/core.hpp"
#include "icm/metrics.hpp"
#include "icm/predictor.hpp"
#include "icm/weights.hpp"

namespace icm {

/// Serial is the reference path; Parallel distributes independent subjects
/// over OpenMP threads. Both produce bit-identical per-subject values.
enum class Execution { Serial, Parallel };

/// Thread count from ICM_THREADS, falling back to the OpenMP default.
int default_thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n). The first exception thrown by any iteration
/// is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

/// Pi(t + dt | t) for every subject.
std::vector<double> predict_window_risks(std::span<const SubjectProfile> profiles, const RiskPredictor& predictor,
                                         const EvaluationWindow& window, Execution exec = Execution::Parallel);

/// Model-based weights aligned with `records`; non-members get zero weights.
std::vector<WeightPair> compute_model_weights(const RiskSet& rs, std::span<const SubjectRecord> records,
                                              std::span<const SubjectProfile> profiles,
                                              const RiskPredictor& predictor,
                                              Execution exec = Execution::Parallel);

/// EPCE predictive probabilities, one per risk-set member in member order.
std::vector<double> compute_epce_probabilities(const RiskSet& rs, std::span<const SubjectRecord> records,
                                               std::span<const SubjectProfile> profiles,
                                               const RiskPredictor& predictor, const QuadratureRule& rule = {},
                                               Execution exec = Execution::Parallel);

/// Reference EPCE probabilities for subjects event-free at t under the true
/// times, in subject order.
std::vector<double> compute_reference_epce_probabilities(std::span<const TrueOutcome> truth,
                                                         std::span<const SubjectProfile> profiles,
                                                         const RiskPredictor& predictor,
                                                         const EvaluationWindow& window,
                                                         Execution exec = Execution::Parallel);

}  // namespace icm
