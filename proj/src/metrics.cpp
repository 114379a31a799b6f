#include "icm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "icm/error.hpp"

namespace icm {

namespace {

void check_aligned(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw Error(ErrorKind::InvalidArgument, std::string(what) + ": array lengths differ");
}

void check_risk(double pi) {
  if (!(pi >= 0.0 && pi <= 1.0)) throw Error(ErrorKind::InvalidArgument, "predicted risk outside [0, 1]");
}

double total(std::span<const double> w) { return std::accumulate(w.begin(), w.end(), 0.0); }

double trapezoid(const RocCurve& c) {
  double area = 0.0;
  for (std::size_t j = 1; j < c.sens.size(); ++j) {
    area += (c.one_minus_spec[j] - c.one_minus_spec[j - 1]) * (c.sens[j] + c.sens[j - 1]) * 0.5;
  }
  return area;
}

// Descending grid: sentinel, unique risks, 0.
std::vector<double> threshold_grid(std::span<const double> risks) {
  std::vector<double> g(risks.begin(), risks.end());
  for (double pi : g) check_risk(pi);
  std::sort(g.begin(), g.end(), std::greater<>());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  g.insert(g.begin(), kThresholdAboveOne);
  if (g.back() != 0.0) g.push_back(0.0);
  return g;
}

void force_endpoints(RocCurve& c) {
  c.sens.front() = 0.0;
  c.one_minus_spec.front() = 0.0;
  c.sens.back() = 1.0;
  c.one_minus_spec.back() = 1.0;
}

template <class Select>
std::vector<double> member_values(const RiskSet& rs, std::size_t n, Select select) {
  std::vector<double> out(n, 0.0);
  for (const auto& m : rs.members) {
    if (m.index >= n) throw Error(ErrorKind::InvalidArgument, "risk set does not match the arrays");
    out[m.index] = select(m);
  }
  return out;
}

}  // namespace

double weighted_sensitivity(std::span<const double> risks, std::span<const double> case_w, double c) {
  check_aligned(risks.size(), case_w.size(), "sensitivity");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < risks.size(); ++i) {
    den += case_w[i];
    if (risks[i] >= c) num += case_w[i];
  }
  if (!(den > 0.0)) throw Error(ErrorKind::NoCaseMass, "total case weight is zero");
  return num / den;
}

double weighted_specificity(std::span<const double> risks, std::span<const double> control_w, double c) {
  check_aligned(risks.size(), control_w.size(), "specificity");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < risks.size(); ++i) {
    den += control_w[i];
    if (risks[i] < c) num += control_w[i];
  }
  if (!(den > 0.0)) throw Error(ErrorKind::NoControlMass, "total control weight is zero");
  return num / den;
}

RocResult weighted_roc(std::span<const double> risks, std::span<const double> case_w,
                       std::span<const double> control_w) {
  check_aligned(risks.size(), case_w.size(), "roc");
  check_aligned(risks.size(), control_w.size(), "roc");
  for (double pi : risks) check_risk(pi);
  const double case_total = total(case_w);
  const double control_total = total(control_w);
  if (!(case_total > 0.0)) throw Error(ErrorKind::NoCaseMass, "total case weight is zero");
  if (!(control_total > 0.0)) throw Error(ErrorKind::NoControlMass, "total control weight is zero");

  std::vector<std::size_t> order(risks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return risks[a] > risks[b]; });

  RocResult out;
  auto& c = out.curve;
  c.thresholds.push_back(kThresholdAboveOne);
  c.sens.push_back(0.0);
  c.one_minus_spec.push_back(0.0);
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    const double v = risks[order[k]];
    for (; k < order.size() && risks[order[k]] == v; ++k) {
      tp += case_w[order[k]];
      fp += control_w[order[k]];
    }
    c.thresholds.push_back(v);
    c.sens.push_back(std::min(1.0, tp / case_total));
    c.one_minus_spec.push_back(std::min(1.0, fp / control_total));
  }
  if (c.thresholds.back() != 0.0) {
    c.thresholds.push_back(0.0);
    c.sens.push_back(1.0);
    c.one_minus_spec.push_back(1.0);
  }
  force_endpoints(c);
  out.auc = std::clamp(trapezoid(c), 0.0, 1.0);
  return out;
}

RocResult roc_and_auc(const std::function<double(double)>& sens, const std::function<double(double)>& spec,
                      std::span<const double> risks) {
  RocResult out;
  auto& c = out.curve;
  c.thresholds = threshold_grid(risks);
  for (double th : c.thresholds) {
    c.sens.push_back(sens(th));
    c.one_minus_spec.push_back(1.0 - spec(th));
  }
  force_endpoints(c);
  out.auc = std::clamp(trapezoid(c), 0.0, 1.0);
  return out;
}

double sensitivity_model(const RiskSet& rs, std::span<const double> risks, std::span<const WeightPair> weights,
                         double c) {
  check_aligned(risks.size(), weights.size(), "model sensitivity");
  const auto w = member_values(rs, risks.size(), [&](const RiskSetMember& m) { return weights[m.index].case_w; });
  return weighted_sensitivity(risks, w, c);
}

double specificity_model(const RiskSet& rs, std::span<const double> risks, std::span<const WeightPair> weights,
                         double c) {
  check_aligned(risks.size(), weights.size(), "model specificity");
  const auto w = member_values(rs, risks.size(), [&](const RiskSetMember& m) { return weights[m.index].control_w; });
  return weighted_specificity(risks, w, c);
}

double brier_model(const RiskSet& rs, std::span<const double> risks, std::span<const WeightPair> weights) {
  check_aligned(risks.size(), weights.size(), "model brier");
  if (rs.n_t() == 0) throw Error(ErrorKind::EmptyRiskSet, "brier score needs n_t >= 1");
  double sum = 0.0;
  for (const auto& m : rs.members) {
    const double pi = risks[m.index];
    check_risk(pi);
    const auto& w = weights[m.index];
    sum += (1.0 - pi) * (1.0 - pi) * w.case_w + pi * pi * w.control_w;
  }
  return sum / static_cast<double>(rs.n_t());
}

IpcwWeights ipcw_weights(const RiskSet& rs, std::span<const SubjectRecord> records,
                         const CensoringSurvival& censoring) {
  IpcwWeights out;
  out.case_w.assign(records.size(), 0.0);
  out.control_w.assign(records.size(), 0.0);
  double control_weight = -1.0;  // computed lazily; G(t+dt | t) may be 0 with no controls
  for (const auto& m : rs.members) {
    if (is_absolute_case(m.scenario)) {
      try {
        out.case_w[m.index] = ipcw_case_weight(records[m.index], censoring, rs.window);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ZeroSurvival) throw;
        ++out.dropped;
      }
    } else if (is_absolute_control(m.scenario)) {
      if (control_weight < 0.0) control_weight = ipcw_control_weight(censoring, rs.window);
      out.control_w[m.index] = control_weight;
    }
  }
  return out;
}

double sensitivity_ipcw(const RiskSet& rs, std::span<const SubjectRecord> records, std::span<const double> risks,
                        const CensoringSurvival& censoring, double c) {
  check_aligned(risks.size(), records.size(), "ipcw sensitivity");
  const auto w = ipcw_weights(rs, records, censoring);
  if (std::none_of(w.case_w.begin(), w.case_w.end(), [](double x) { return x > 0.0; })) {
    throw Error(ErrorKind::NoAbsoluteCases, "no absolute case in the risk set");
  }
  return weighted_sensitivity(risks, w.case_w, c);
}

double specificity_ipcw(const RiskSet& rs, std::span<const double> risks, double c) {
  std::size_t controls = 0;
  std::size_t below = 0;
  for (const auto& m : rs.members) {
    if (!is_absolute_control(m.scenario)) continue;
    ++controls;
    if (risks[m.index] < c) ++below;
  }
  if (controls == 0) throw Error(ErrorKind::NoAbsoluteControls, "no absolute control in the risk set");
  return static_cast<double>(below) / static_cast<double>(controls);
}

double brier_ipcw(const RiskSet& rs, std::span<const SubjectRecord> records, std::span<const double> risks,
                  const CensoringSurvival& censoring) {
  check_aligned(risks.size(), records.size(), "ipcw brier");
  if (rs.n_t() == 0) throw Error(ErrorKind::EmptyRiskSet, "brier score needs n_t >= 1");
  const auto w = ipcw_weights(rs, records, censoring);
  double sum = 0.0;
  for (const auto& m : rs.members) {
    const double pi = risks[m.index];
    check_risk(pi);
    sum += (1.0 - pi) * (1.0 - pi) * w.case_w[m.index] + pi * pi * w.control_w[m.index];
  }
  return sum / static_cast<double>(rs.n_t());
}

LabelledMetrics naive_metrics(const RiskSet& rs, std::span<const SubjectRecord> records,
                              std::span<const double> risks) {
  check_aligned(risks.size(), records.size(), "naive metrics");
  std::vector<double> case_w(records.size(), 0.0);
  std::vector<double> control_w(records.size(), 0.0);
  LabelledMetrics out;
  double sum = 0.0;
  const double t = rs.window.t;
  const double b = rs.window.end();
  for (const auto& m : rs.members) {
    const auto& r = records[m.index];
    const double end = r.endpoint();
    const double pi = risks[m.index];
    if (r.delta == EventKind::Progression && end >= t && end < b) {
      case_w[m.index] = 1.0;
      ++out.cases;
      sum += (1.0 - pi) * (1.0 - pi);
    } else if (end >= b) {
      control_w[m.index] = 1.0;
      ++out.controls;
      sum += pi * pi;
    }
  }
  out.roc = weighted_roc(risks, case_w, control_w);
  out.n = out.cases + out.controls;
  out.brier = sum / static_cast<double>(out.n);
  return out;
}

LabelledMetrics reference_metrics(std::span<const TrueOutcome> truth, std::span<const double> risks,
                                  const EvaluationWindow& window) {
  check_aligned(risks.size(), truth.size(), "reference metrics");
  std::vector<double> case_w(truth.size(), 0.0);
  std::vector<double> control_w(truth.size(), 0.0);
  LabelledMetrics out;
  double sum = 0.0;
  const double t = window.t;
  const double b = window.end();
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double tp = truth[i].t_prg_star;
    const double tt = truth[i].t_trt_star;
    if (std::min(tp, tt) < t) continue;
    ++out.n;
    const double pi = risks[i];
    if (tp < b && tp < tt) {
      case_w[i] = 1.0;
      ++out.cases;
      sum += (1.0 - pi) * (1.0 - pi);
    } else if (std::min(tp, tt) >= b) {
      control_w[i] = 1.0;
      ++out.controls;
      sum += pi * pi;
    }
  }
  if (out.n == 0) throw Error(ErrorKind::EmptyRiskSet, "no subject event-free at t under the true times");
  out.roc = weighted_roc(risks, case_w, control_w);
  out.brier = sum / static_cast<double>(out.n);
  return out;
}

double epce_probability(const SubjectRecord& r, const SubjectProfile& prof, const RiskPredictor& pred,
                        const EvaluationWindow& w, const QuadratureRule& rule) {
  const double t = w.t;
  const double b = w.end();
  const double lneg = r.t_last_neg;
  const double end = r.endpoint();
  const bool d1 = lneg <= b && end >= t;
  const bool d2 = lneg >= b && r.delta == EventKind::Censored;
  double p = 0.0;
  if (d1) {
    const double t1 = std::max(lneg, t);
    const double t2 = r.delta == EventKind::Censored ? b : std::min(end, b);
    if (t2 > t1) {
      const double base = pred.cif(prof, t1, t);
      // Literal time integral of Pr(t1 <= T* < s | event-free at t); units are years.
      p += rule.integrate([&](double s) { return pred.cif(prof, s, t) - base; }, t1, t2);
    }
  }
  if (d2) p += pred.surv(prof, b, t);
  return p;
}

double epce_reference_probability(const TrueOutcome& tr, const SubjectProfile& prof, const RiskPredictor& pred,
                                  const EvaluationWindow& w) {
  const double t = w.t;
  const double b = w.end();
  if (std::min(tr.t_prg_star, tr.t_trt_star) < t) return 0.0;
  const double tilde = std::min(tr.t_prg_star, b);
  const bool d1 = tr.t_prg_star >= t && tr.t_prg_star < b && tr.t_prg_star < tr.t_trt_star;
  const bool d2 = tr.t_prg_star >= std::min(tr.t_trt_star, b);
  double p = 0.0;
  if (d1) p += pred.cif(prof, tilde, t);
  if (d2) p += pred.surv(prof, tilde, t);
  return p;
}

EpceResult epce_from_probabilities(std::span<const double> probabilities, std::size_t n_t) {
  if (n_t == 0) throw Error(ErrorKind::EmptyRiskSet, "EPCE needs n_t >= 1");
  EpceResult out;
  out.n_t = n_t;
  double sum = 0.0;
  for (double p : probabilities) {
    if (p > 0.0 && std::isfinite(p)) {
      sum += -std::log(p);
      ++out.contributing;
    } else {
      ++out.excluded;
    }
  }
  if (out.contributing == 0) {
    throw Error(ErrorKind::AllContributionsDegenerate, "no subject has a positive predictive probability");
  }
  out.value = sum / static_cast<double>(out.contributing);
  return out;
}

EpceResult epce_model(const RiskSet& rs, std::span<const SubjectRecord> records,
                      std::span<const SubjectProfile> profiles, const RiskPredictor& predictor,
                      const QuadratureRule& rule) {
  check_aligned(records.size(), profiles.size(), "epce");
  std::vector<double> p;
  p.reserve(rs.n_t());
  for (const auto& m : rs.members) {
    p.push_back(epce_probability(records[m.index], profiles[m.index], predictor, rs.window, rule));
  }
  return epce_from_probabilities(p, rs.n_t());
}

EpceResult epce_reference(std::span<const TrueOutcome> truth, std::span<const SubjectProfile> profiles,
                          const RiskPredictor& predictor, const EvaluationWindow& window) {
  check_aligned(truth.size(), profiles.size(), "reference epce");
  std::vector<double> p;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (std::min(truth[i].t_prg_star, truth[i].t_trt_star) < window.t) continue;
    p.push_back(epce_reference_probability(truth[i], profiles[i], predictor, window));
  }
  return epce_from_probabilities(p, p.size());
}

std::string_view to_string(Approach a) {
  switch (a) {
    case Approach::Model: return "model";
    case Approach::Ipcw: return "ipcw";
    case Approach::Naive: return "naive";
    case Approach::Reference: return "reference";
  }
  return "?";
}

std::optional<Approach> approach_from_string(std::string_view s) {
  for (auto a : {Approach::Model, Approach::Ipcw, Approach::Naive, Approach::Reference}) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

}  // namespace icm
