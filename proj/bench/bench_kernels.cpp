#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "icm/evaluation.hpp"
#include "icm/kernels.hpp"
#include "icm/simulator.hpp"

using namespace icm;

namespace {

double seconds(const std::function<void()>& f, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 300;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 3;
  set_thread_count(default_thread_count());

  SimulationConfig cfg;
  cfg.n_subjects = n;
  const auto data = generate_dataset(cfg, 0, Execution::Serial);
  std::vector<SubjectRecord> recs;
  std::vector<SubjectProfile> profs;
  std::vector<TrueOutcome> truth;
  for (const auto& s : data) {
    recs.push_back(s.record);
    profs.push_back(s.profile);
    truth.push_back(s.truth);
  }
  const JointModelPredictor pred(cfg.params);
  const EvaluationWindow w{1.0, 3.0};
  const auto rs = build_risk_set(recs, w);

  std::printf("subjects=%zu threads=%d reps=%d\n", n, default_thread_count(), reps);
  std::printf("%-22s %12s %12s %8s\n", "kernel", "serial_s", "parallel_s", "speedup");
  auto row = [&](const char* name, const std::function<void(Execution)>& f) {
    const double s = seconds([&] { f(Execution::Serial); }, reps);
    const double p = seconds([&] { f(Execution::Parallel); }, reps);
    std::printf("%-22s %12.5f %12.5f %8.2f\n", name, s, p, s / p);
  };
  row("simulate", [&](Execution e) { generate_dataset(cfg, 0, e); });
  row("window_risks", [&](Execution e) { predict_window_risks(profs, pred, w, e); });
  row("model_weights", [&](Execution e) { compute_model_weights(rs, recs, profs, pred, e); });
  row("epce_probabilities", [&](Execution e) { compute_epce_probabilities(rs, recs, profs, pred, {}, e); });
  row("evaluate_all", [&](Execution e) {
    EvaluationRequest req;
    req.reference = req.epce = true;
    req.exec = e;
    evaluate_dataset(recs, profs, &truth, pred, req);
  });
  return 0;
}
