#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "icm/core.hpp"
#include "icm/metrics.hpp"

namespace icm::test {

inline SubjectRecord progression(double t_last_neg, double t_pos, std::string id = "p") {
  SubjectRecord r;
  r.id = std::move(id);
  r.t_last_neg = t_last_neg;
  r.t_pos = t_pos;
  r.delta = EventKind::Progression;
  return r;
}

inline SubjectRecord treated(double t_last_neg, double t_trt, std::string id = "t") {
  SubjectRecord r;
  r.id = std::move(id);
  r.t_last_neg = t_last_neg;
  r.t_trt = t_trt;
  r.delta = EventKind::Treatment;
  return r;
}

inline SubjectRecord censored(double t_last_neg, double t_cen, std::string id = "c") {
  SubjectRecord r;
  r.id = std::move(id);
  r.t_last_neg = t_last_neg;
  r.t_cen = t_cen;
  r.delta = EventKind::Censored;
  return r;
}

// Closed forms for competing exponentials.
inline double cp_cif(double lp, double lt, double s, double r) {
  const double l = lp + lt;
  return lp / l * (1.0 - std::exp(-l * (s - r)));
}

inline double cp_surv(double lp, double lt, double s, double r) { return std::exp(-(lp + lt) * (s - r)); }

// Weighted Mann-Whitney statistic by explicit pair enumeration.
inline double mann_whitney(const std::vector<double>& risks, const std::vector<double>& case_w,
                           const std::vector<double>& control_w) {
  double num = 0.0;
  double wc = 0.0;
  double wk = 0.0;
  for (double w : case_w) wc += w;
  for (double w : control_w) wk += w;
  for (std::size_t i = 0; i < risks.size(); ++i) {
    for (std::size_t j = 0; j < risks.size(); ++j) {
      const double pair = case_w[i] * control_w[j];
      if (pair == 0.0) continue;
      if (risks[i] > risks[j]) num += pair;
      else if (risks[i] == risks[j]) num += 0.5 * pair;
    }
  }
  return num / (wc * wk);
}

}  // namespace icm::test
