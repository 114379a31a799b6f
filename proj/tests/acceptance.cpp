// Acceptance suite: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "icm/error.hpp"
#include "icm/evaluation.hpp"
#include "icm/io.hpp"
#include "icm/kernels.hpp"
#include "icm/simulator.hpp"

using namespace icm;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = limit_s <= 0.0 || secs < limit_s;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  char timing[96];
  if (limit_s > 0.0) {
    std::snprintf(timing, sizeof timing, "%.1fs, limit %.0fs", secs, limit_s);
  } else {
    std::snprintf(timing, sizeof timing, "%.1fs", secs);
  }
  std::printf("[%s] %2d %s: %s (%s)\n", ok ? "PASS" : "FAIL", id, title, o.detail.c_str(), timing);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Replicate {
  std::vector<SubjectRecord> records;
  std::vector<SubjectProfile> profiles;
  std::vector<TrueOutcome> truth;
};

Replicate unpack(const std::vector<SimulatedSubject>& data) {
  Replicate r;
  for (const auto& s : data) {
    r.records.push_back(s.record);
    r.profiles.push_back(s.profile);
    r.truth.push_back(s.truth);
  }
  return r;
}

constexpr std::uint64_t kSeed = 20240601;
constexpr std::size_t kReplicates = 50;
const EvaluationWindow kWindow{1.0, 3.0};

std::vector<Replicate> simulate(const std::string& schedule, std::size_t n_rep) {
  SimulationConfig cfg;
  cfg.seed = kSeed;
  cfg.schedule = BiopsySchedule::parse(schedule);
  std::vector<Replicate> out;
  for (std::size_t r = 0; r < n_rep; ++r) out.push_back(unpack(generate_dataset(cfg, r)));
  return out;
}

std::vector<std::vector<MetricsReport>> evaluate_all(const std::vector<Replicate>& reps, bool epce = false) {
  const JointModelPredictor pred(ModelParameters::reference());
  EvaluationRequest req;
  req.window = kWindow;
  req.reference = true;
  req.epce = epce;
  std::vector<std::vector<MetricsReport>> out;
  for (const auto& r : reps) out.push_back(evaluate_dataset(r.records, r.profiles, &r.truth, pred, req));
  return out;
}

const ApproachSummary& summary_of(const ComparisonSummary& s, Approach a) {
  for (const auto& x : s.approaches) {
    if (x.approach == a) return x;
  }
  throw Error(ErrorKind::InvalidArgument, "approach missing from summary");
}

double mann_whitney(const std::vector<double>& risks, const std::vector<double>& cw, const std::vector<double>& kw) {
  double num = 0.0, sc = 0.0, sk = 0.0;
  for (double w : cw) sc += w;
  for (double w : kw) sk += w;
  for (std::size_t i = 0; i < risks.size(); ++i) {
    for (std::size_t j = 0; j < risks.size(); ++j) {
      const double p = cw[i] * kw[j];
      if (risks[i] > risks[j]) num += p;
      else if (risks[i] == risks[j]) num += 0.5 * p;
    }
  }
  return num / (sc * sk);
}

Outcome criterion1() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> kind(0, 2);
  std::size_t checked = 0, s2 = 0, s3a = 0, s4 = 0, bad = 0;
  double worst = 0.0;
  const SubjectProfile prof;
  while (checked < 10000) {
    const ConstantHazardPredictor pred(0.01 + 1.5 * u(rng), 0.01 + 1.5 * u(rng));
    const EvaluationWindow w{0.2 + 3.0 * u(rng), 0.5 + 4.0 * u(rng)};
    const double a = 8.0 * u(rng);
    const double b = a + 0.01 + 4.0 * u(rng);
    SubjectRecord r;
    r.t_last_neg = a;
    switch (kind(rng)) {
      case 0: r.delta = EventKind::Progression; r.t_pos = b; break;
      case 1: r.delta = EventKind::Treatment; r.t_trt = b; break;
      default: r.delta = EventKind::Censored; r.t_cen = b; break;
    }
    if (classify_scenario(r, w) == ScenarioCode::Excluded) continue;
    ++checked;
    const auto wp = model_weights(r, w, pred, prof);
    if (!(wp.case_w >= 0.0 && wp.case_w <= 1.0 && wp.control_w >= 0.0 && wp.control_w <= 1.0)) ++bad;
    if (wp.scenario == ScenarioCode::S2a || wp.scenario == ScenarioCode::S2b) {
      ++s2;
      worst = std::max(worst, std::abs(wp.case_w + wp.control_w - 1.0));
    }
    if (wp.scenario == ScenarioCode::S3a) {
      ++s3a;
      if (wp.case_w != 1.0) ++bad;
    }
    if (is_absolute_control(wp.scenario)) {
      ++s4;
      if (wp.control_w != 1.0) ++bad;
    }
  }
  return {bad == 0 && worst <= 1e-10 && s2 > 0 && s3a > 0 && s4 > 0,
          fmt("%zu triples, %zu out of range/identity violations, max |W+W'-1| over %zu S2a/S2b = %.2e, "
              "%zu S3a, %zu S4x",
              checked, bad, s2, worst, s3a, s4)};
}

Outcome criterion2() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const SubjectProfile prof;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double lp = 0.01 + 1.0 * u(rng);
    const double lt = 0.01 + 1.0 * u(rng);
    const double r = 9.0 * u(rng);
    const double s = r + (10.0 - r) * u(rng);
    const JointModel m(ModelParameters::constant_hazards(lp, lt));
    const double l = lp + lt;
    const double cif = lp / l * -std::expm1(-l * (s - r));
    const double surv = std::exp(-l * (s - r));
    worst = std::max(worst, std::abs(m.cif(prof, Cause::Progression, s, r) - cif));
    worst = std::max(worst, std::abs(m.overall_survival(prof, s, r) - surv));
  }
  const JointModel m(ModelParameters::constant_hazards(0.2, 0.1));
  const double example = m.cif(prof, Cause::Progression, 4.0, 1.0);
  const double closed = 2.0 / 3.0 * -std::expm1(-0.9);
  worst = std::max(worst, std::abs(example - closed));
  return {worst <= 1e-8, fmt("max abs error %.2e over 1000 draws; cif(4|1; 0.2, 0.1) = %.7f (closed form %.7f)", worst,
                             example, closed)};
}

Outcome criterion3() {
  std::vector<SubjectRecord> recs;
  std::vector<TrueOutcome> truth;
  std::vector<SubjectProfile> profs;
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    SubjectRecord r;
    r.id = "X" + std::to_string(i);
    r.delta = EventKind::Progression;
    if (i % 2 == 0) {  // absolute case inside [1, 4)
      r.t_last_neg = 1.0 + 2.0 * u(rng);
      r.t_pos = r.t_last_neg + 0.05 + (3.95 - r.t_last_neg - 0.05) * u(rng);
      truth.push_back({r.t_last_neg + 0.5 * (*r.t_pos - r.t_last_neg), 50.0});
    } else {  // absolute control, negative biopsy after the window
      r.t_last_neg = 4.0 + 3.0 * u(rng);
      r.t_pos = r.t_last_neg + 1.0;
      truth.push_back({r.t_last_neg + 0.5, 50.0});
    }
    recs.push_back(r);
    SubjectProfile p;
    p.density = (i % 2 == 0 ? 0.15 : 0.02) + 0.3 * u(rng);
    p.u = {0.5 * (u(rng) - 0.5), u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5};
    profs.push_back(p);
  }
  const JointModelPredictor pred(ModelParameters::reference());
  EvaluationRequest req;
  req.reference = true;
  const auto reps = evaluate_dataset(recs, profs, &truth, pred, req);
  std::map<Approach, const MetricsReport*> by;
  for (const auto& r : reps) by[r.approach] = &r;
  const double auc = *by[Approach::Model]->auc;
  bool auc_equal = true;
  double brier_gap = 0.0;
  for (const auto& r : reps) {
    auc_equal = auc_equal && r.auc && *r.auc == auc;
    brier_gap = std::max(brier_gap, std::abs(*r.brier - *by[Approach::Model]->brier));
  }
  return {auc_equal && brier_gap <= 1e-12,
          fmt("AUC model/ipcw/naive/reference = %.15f/%.15f/%.15f/%.15f, max Brier gap %.2e", auc,
              *by[Approach::Ipcw]->auc, *by[Approach::Naive]->auc, *by[Approach::Reference]->auc, brier_gap)};
}

Outcome criterion4() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, 50);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = size(rng);
    std::vector<double> risks(n), cw(n), kw(n);
    for (int i = 0; i < n; ++i) {
      risks[i] = rep % 2 ? u(rng) : std::round(10.0 * u(rng)) / 10.0;
      cw[i] = u(rng) < 0.5 ? u(rng) : 0.0;
      kw[i] = u(rng) < 0.5 ? u(rng) : 0.0;
    }
    cw[0] += 0.5;
    kw[n - 1] += 0.5;
    const double mw = mann_whitney(risks, cw, kw);
    const auto grid = roc_and_auc([&](double c) { return weighted_sensitivity(risks, cw, c); },
                                  [&](double c) { return weighted_specificity(risks, kw, c); }, risks);
    worst = std::max(worst, std::abs(grid.auc - mw));
    worst = std::max(worst, std::abs(weighted_roc(risks, cw, kw).auc - mw));
  }
  return {worst <= 1e-10, fmt("max |trapezoid - Mann-Whitney| = %.2e over 100 cohorts", worst)};
}

struct Proportions {
  double prg = 0, trt = 0, cen = 0;
};

Proportions proportions(const std::vector<Replicate>& reps) {
  double n = 0;
  Proportions p;
  for (const auto& r : reps) {
    for (const auto& s : r.records) {
      n += 1;
      if (s.delta == EventKind::Progression) p.prg += 1;
      else if (s.delta == EventKind::Treatment) p.trt += 1;
      else p.cen += 1;
    }
  }
  return {100 * p.prg / n, 100 * p.trt / n, 100 * p.cen / n};
}

bool curve_monotone(const RocCurve& c) {
  for (std::size_t j = 1; j < c.sens.size(); ++j) {
    if (c.thresholds[j] > c.thresholds[j - 1]) return false;
    if (c.sens[j] < c.sens[j - 1] || c.one_minus_spec[j] < c.one_minus_spec[j - 1]) return false;
  }
  return true;
}

// Sensitivity non-increasing and specificity non-decreasing in c, evaluated
// pointwise on the ascending threshold grid.
bool pointwise_monotone(const std::function<double(double)>& sens, const std::function<double(double)>& spec,
                        std::vector<double> grid) {
  std::sort(grid.begin(), grid.end());
  double ps = 2.0, pp = -1.0;
  for (double c : grid) {
    const double s = sens(c);
    const double p = spec(c);
    if (s > ps || p < pp) return false;
    ps = s;
    pp = p;
  }
  return true;
}

}  // namespace

int main() {
  set_thread_count(default_thread_count());
  std::printf("acceptance suite, threads=%d, seed=%llu\n", default_thread_count(),
              static_cast<unsigned long long>(kSeed));

  report(1, "weight identities", 5.0, criterion1);
  report(2, "quadrature oracle", 5.0, criterion2);
  report(3, "degenerate equivalence", 0.0, criterion3);
  report(4, "AUC oracle", 0.0, criterion4);

  std::vector<Replicate> pass;
  report(5, "simulation calibration", 120.0, [&] {
    pass = simulate("pass", kReplicates);
    const auto p = proportions(pass);
    const bool ok = std::abs(p.prg - 22.35) <= 5 && std::abs(p.trt - 9.18) <= 5 && std::abs(p.cen - 68.47) <= 5;
    return Outcome{ok, fmt("%zu x 300 PASS: progression %.2f%% / treatment %.2f%% / censored %.2f%% "
                           "(target 22.35 / 9.18 / 68.47 +-5pp)",
                           pass.size(), p.prg, p.trt, p.cen)};
  });

  std::vector<std::vector<MetricsReport>> pass_reports;
  report(6, "model Brier beats IPCW Brier", 600.0, [&] {
    pass_reports = evaluate_all(pass);
    const auto s = summarize_replicates(pass_reports);
    const double m = summary_of(s, Approach::Model).rmse_brier;
    const double i = summary_of(s, Approach::Ipcw).rmse_brier;
    return Outcome{m < 0.5 * i, fmt("RMSE Brier model %.4f vs IPCW %.4f (ratio %.2f, need < 0.5)", m, i, m / i)};
  });

  report(7, "schedule sweep", 2400.0, [&] {
    std::map<std::string, std::pair<double, double>> rmse;  // schedule -> (model AUC, ipcw AUC)
    std::string line;
    for (const char* sched : {"u0.3-1", "u1-2", "pass", "u0.3-4"}) {
      const auto reports = std::string(sched) == "pass" ? pass_reports : evaluate_all(simulate(sched, kReplicates));
      const auto s = summarize_replicates(reports);
      rmse[sched] = {summary_of(s, Approach::Model).rmse_auc, summary_of(s, Approach::Ipcw).rmse_auc};
      line += fmt("%s model %.4f ipcw %.4f; ", sched, rmse[sched].first, rmse[sched].second);
    }
    double lo = 1e9, hi = 0;
    for (const auto& [k, v] : rmse) {
      lo = std::min(lo, v.first);
      hi = std::max(hi, v.first);
    }
    const double ipcw_growth = rmse["u0.3-4"].second / rmse["u0.3-1"].second - 1.0;
    const double model_spread = (hi - lo) / lo;
    const bool ok = ipcw_growth >= 0.5 && model_spread < 0.5;
    return Outcome{ok, line + fmt("IPCW AUC RMSE growth u0.3-4 vs u0.3-1 %+.0f%% (need >= +50%%), "
                                  "model AUC RMSE spread %.0f%% (need < 50%%)",
                                  100 * ipcw_growth, 100 * model_spread)};
  });

  report(8, "EPCE consistency", 0.0, [&] {
    const std::size_t n = 10;
    EvaluationRequest req;
    req.window = kWindow;
    req.model = true;
    req.ipcw = req.naive = false;
    req.reference = true;
    req.epce = true;
    double sum_model = 0, sum_ref = 0;
    std::map<double, std::pair<double, double>> by_scale;
    std::size_t within = 0, model_dir = 0, ref_dir = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const auto& rep = pass[r];
      std::map<double, std::pair<double, double>> e;
      for (double f : {0.5, 1.0, 1.5}) {
        const JointModelPredictor pred(with_hazard_scale(ModelParameters::reference(), f));
        const auto out = evaluate_dataset(rep.records, rep.profiles, &rep.truth, pred, req);
        e[f] = {*out[0].epce, *out[1].epce};
        by_scale[f].first += e[f].first / static_cast<double>(n);
        by_scale[f].second += e[f].second / static_cast<double>(n);
      }
      sum_model += e[1.0].first;
      sum_ref += e[1.0].second;
      if (std::abs(e[1.0].first - e[1.0].second) < 0.1) ++within;
      if (e[0.5].first > e[1.0].first && e[1.5].first > e[1.0].first) ++model_dir;
      if (e[0.5].second > e[1.0].second && e[1.5].second > e[1.0].second) ++ref_dir;
    }
    const double gap = std::abs(sum_model - sum_ref) / static_cast<double>(n);
    const bool ok = gap < 0.1 && model_dir >= 9 && ref_dir >= 9;
    return Outcome{ok, fmt("mean EPCE model %.4f vs reference %.4f (|gap| %.4f, need < 0.1; %zu/10 replicates within "
                           "0.1); +-50%% hazard scale raises EPCE in %zu/10 (model) and %zu/10 (reference), need >= 9; "
                           "mean EPCE at scale 0.5/1/1.5: model %.3f/%.3f/%.3f, reference %.3f/%.3f/%.3f",
                           sum_model / n, sum_ref / n, gap, within, model_dir, ref_dir, by_scale[0.5].first,
                           by_scale[1.0].first, by_scale[1.5].first, by_scale[0.5].second, by_scale[1.0].second,
                           by_scale[1.5].second)};
  });

  report(9, "monotonicity suite", 0.0, [&] {
    const JointModelPredictor pred(ModelParameters::reference());
    std::size_t curves = 0, bad = 0;
    for (std::size_t r = 0; r < pass.size(); ++r) {
      const auto& rep = pass[r];
      for (const auto& m : pass_reports[r]) {
        if (m.auc) {
          ++curves;
          if (!curve_monotone(m.roc) || *m.auc < 0.0 || *m.auc > 1.0) ++bad;
        }
        if (m.brier && (*m.brier < 0.0 || *m.brier > 1.0)) ++bad;
      }
      const auto rs = build_risk_set(rep.records, kWindow);
      const auto risks = predict_window_risks(rep.profiles, pred, kWindow);
      const auto w = compute_model_weights(rs, rep.records, rep.profiles, pred);
      std::vector<double> grid = risks;
      grid.push_back(0.0);
      grid.push_back(kThresholdAboveOne);
      if (!pointwise_monotone([&](double c) { return sensitivity_model(rs, risks, w, c); },
                              [&](double c) { return specificity_model(rs, risks, w, c); }, grid)) {
        ++bad;
      }
      const auto g = km_censoring_survival(rep.records, kWindow.t);
      if (!pointwise_monotone([&](double c) { return sensitivity_ipcw(rs, rep.records, risks, g, c); },
                              [&](double c) { return specificity_ipcw(rs, risks, c); }, grid)) {
        ++bad;
      }
      curves += 2;
    }
    return Outcome{bad == 0, fmt("%zu curves over %zu replicates, %zu violations", curves, pass.size(), bad)};
  });

  report(10, "determinism", 0.0, [&] {
    auto run = [](int threads) {
      set_thread_count(threads);
      SimulationConfig cfg;
      cfg.seed = kSeed;
      cfg.n_subjects = 300;
      const auto data = generate_dataset(cfg, 0);
      const auto rep = unpack(data);
      const JointModelPredictor pred(cfg.params);
      EvaluationRequest req;
      req.reference = req.epce = true;
      const auto out = evaluate_dataset(rep.records, rep.profiles, &rep.truth, pred, req);
      return events_csv(rep.records) + longitudinal_csv(rep.records) + truth_csv(rep.records, rep.truth) +
             reports_json(out);
    };
    const auto a = run(1);
    const auto b = run(4);
    const auto c = run(1);
    set_thread_count(default_thread_count());
    return Outcome{a == b && a == c, fmt("%zu bytes of CSV + report JSON, identical across runs and 1 vs 4 threads: %s",
                                         a.size(), a == b && a == c ? "yes" : "no")};
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
