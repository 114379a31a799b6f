#include "icm/evaluation.hpp"

#include <cmath>
#include <sstream>

#include "icm/error.hpp"

namespace icm {

void set_approaches(EvaluationRequest& req, const std::string& list) {
  req.model = req.ipcw = req.naive = req.reference = req.epce = false;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "model") req.model = true;
    else if (item == "ipcw") req.ipcw = true;
    else if (item == "naive") req.naive = true;
    else if (item == "reference") req.reference = true;
    else if (item == "epce") req.epce = true;
    else if (!item.empty()) throw Error(ErrorKind::InvalidArgument, "unknown approach '" + item + "'");
  }
}

namespace {

bool is_mass_error(ErrorKind k) {
  return k == ErrorKind::NoCaseMass || k == ErrorKind::NoControlMass || k == ErrorKind::NoAbsoluteCases ||
         k == ErrorKind::NoAbsoluteControls;
}

// Runs f; on a missing-mass error records a note and leaves the field empty.
template <class F>
void try_metric(MetricsReport& rep, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (!is_mass_error(e.kind())) throw;
    rep.diagnostics.notes.emplace_back(e.what());
  }
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

std::vector<MetricsReport> evaluate_dataset(std::span<const SubjectRecord> records,
                                            std::span<const SubjectProfile> profiles,
                                            const std::vector<TrueOutcome>* truth, const RiskPredictor& predictor,
                                            const EvaluationRequest& req) {
  if (records.size() != profiles.size()) throw Error(ErrorKind::InvalidArgument, "records/profiles length mismatch");
  if (req.reference && (truth == nullptr || truth->size() != records.size())) {
    throw Error(ErrorKind::MissingTruth, "reference metrics need the hidden event times");
  }
  for (const auto& r : records) validate_record(r);
  const RiskSet rs = build_risk_set(records, req.window);
  const auto risks = predict_window_risks(profiles, predictor, req.window, req.exec);

  std::vector<MetricsReport> out;
  auto blank = [&](Approach a) {
    MetricsReport rep;
    rep.window = req.window;
    rep.approach = a;
    rep.n_t = rs.n_t();
    return rep;
  };

  if (req.model || req.epce) {
    auto rep = blank(Approach::Model);
    const auto w = compute_model_weights(rs, records, profiles, predictor, req.exec);
    std::vector<double> cw(w.size()), kw(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      cw[i] = w[i].case_w;
      kw[i] = w[i].control_w;
      if (w[i].degenerate) ++rep.diagnostics.degenerate_denominators;
    }
    rep.case_mass = sum(cw);
    rep.control_mass = sum(kw);
    rep.brier = brier_model(rs, risks, w);
    try_metric(rep, [&] {
      auto roc = weighted_roc(risks, cw, kw);
      rep.auc = roc.auc;
      rep.roc = std::move(roc.curve);
    });
    if (req.epce) {
      const auto p = compute_epce_probabilities(rs, records, profiles, predictor, req.rule, req.exec);
      try {
        const auto e = epce_from_probabilities(p, rs.n_t());
        rep.epce = e.value;
        rep.diagnostics.epce_excluded = e.excluded;
        rep.diagnostics.epce_contributing = e.contributing;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::AllContributionsDegenerate) throw;
        rep.diagnostics.epce_excluded = p.size();
        rep.diagnostics.notes.emplace_back(e.what());
      }
    }
    out.push_back(std::move(rep));
  }

  if (req.ipcw) {
    auto rep = blank(Approach::Ipcw);
    const auto cens = km_censoring_survival(records, req.window.t);
    const auto w = ipcw_weights(rs, records, cens);
    rep.diagnostics.dropped_subjects = w.dropped;
    rep.case_mass = sum(w.case_w);
    rep.control_mass = sum(w.control_w);
    rep.brier = brier_ipcw(rs, records, risks, cens);
    try_metric(rep, [&] {
      if (!(rep.case_mass > 0.0)) throw Error(ErrorKind::NoAbsoluteCases, "no absolute case in the risk set");
      if (!(rep.control_mass > 0.0)) {
        throw Error(ErrorKind::NoAbsoluteControls, "no absolute control in the risk set");
      }
      auto roc = weighted_roc(risks, w.case_w, w.control_w);
      rep.auc = roc.auc;
      rep.roc = std::move(roc.curve);
    });
    out.push_back(std::move(rep));
  }

  if (req.naive) {
    auto rep = blank(Approach::Naive);
    try_metric(rep, [&] {
      auto m = naive_metrics(rs, records, risks);
      rep.auc = m.roc.auc;
      rep.brier = m.brier;
      rep.roc = std::move(m.roc.curve);
      rep.case_mass = static_cast<double>(m.cases);
      rep.control_mass = static_cast<double>(m.controls);
    });
    out.push_back(std::move(rep));
  }

  if (req.reference) {
    auto rep = blank(Approach::Reference);
    try_metric(rep, [&] {
      auto m = reference_metrics(*truth, risks, req.window);
      rep.n_t = m.n;
      rep.auc = m.roc.auc;
      rep.brier = m.brier;
      rep.roc = std::move(m.roc.curve);
      rep.case_mass = static_cast<double>(m.cases);
      rep.control_mass = static_cast<double>(m.controls);
    });
    if (req.epce) {
      const auto p = compute_reference_epce_probabilities(*truth, profiles, predictor, req.window, req.exec);
      const auto e = epce_from_probabilities(p, p.size());
      rep.epce = e.value;
      rep.diagnostics.epce_excluded = e.excluded;
      rep.diagnostics.epce_contributing = e.contributing;
    }
    out.push_back(std::move(rep));
  }
  return out;
}

namespace {

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  m.n = v.size();
  if (v.empty()) return m;
  m.mean = sum(v) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return m;
}

double rmse(const std::vector<double>& diff) {
  if (diff.empty()) return 0.0;
  double ss = 0.0;
  for (double d : diff) ss += d * d;
  return std::sqrt(ss / static_cast<double>(diff.size()));
}

const MetricsReport* find(const std::vector<MetricsReport>& reps, Approach a) {
  for (const auto& r : reps) {
    if (r.approach == a) return &r;
  }
  return nullptr;
}

}  // namespace

ComparisonSummary summarize_replicates(std::vector<std::vector<MetricsReport>> replicates) {
  ComparisonSummary out;
  for (std::size_t i = 0; i < replicates.size(); ++i) {
    if (find(replicates[i], Approach::Reference) == nullptr) {
      throw Error(ErrorKind::MissingTruth, "replicate " + std::to_string(i) + " has no reference metrics");
    }
  }
  for (auto a : {Approach::Model, Approach::Ipcw, Approach::Naive, Approach::Reference}) {
    std::vector<double> auc, brier, d_auc, d_brier;
    bool present = false;
    for (const auto& reps : replicates) {
      const auto* r = find(reps, a);
      if (r == nullptr) continue;
      present = true;
      const auto* ref = find(reps, Approach::Reference);
      if (r->auc) {
        auc.push_back(*r->auc);
        if (ref->auc) d_auc.push_back(*r->auc - *ref->auc);
      }
      if (r->brier) {
        brier.push_back(*r->brier);
        if (ref->brier) d_brier.push_back(*r->brier - *ref->brier);
      }
    }
    if (!present) continue;
    ApproachSummary s;
    s.approach = a;
    const auto ma = moments(auc);
    const auto mb = moments(brier);
    s.n_auc = ma.n;
    s.mean_auc = ma.mean;
    s.sd_auc = ma.sd;
    s.rmse_auc = rmse(d_auc);
    s.n_brier = mb.n;
    s.mean_brier = mb.mean;
    s.sd_brier = mb.sd;
    s.rmse_brier = rmse(d_brier);
    out.approaches.push_back(s);
  }

  std::vector<double> em, er, ed;
  for (const auto& reps : replicates) {
    const auto* m = find(reps, Approach::Model);
    const auto* r = find(reps, Approach::Reference);
    if (m && r && m->epce && r->epce) {
      em.push_back(*m->epce);
      er.push_back(*r->epce);
      ed.push_back(*m->epce - *r->epce);
    }
  }
  if (!em.empty()) {
    EpceSummary e;
    const auto mm = moments(em);
    const auto mr = moments(er);
    e.n = mm.n;
    e.mean_model = mm.mean;
    e.sd_model = mm.sd;
    e.mean_reference = mr.mean;
    e.sd_reference = mr.sd;
    e.rmse = rmse(ed);
    out.epce = e;
  }
  out.replicates = std::move(replicates);
  return out;
}

}  // namespace icm
