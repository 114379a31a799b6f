#include "icm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Dense>

#include "icm/error.hpp"

namespace icm {

BiopsySchedule BiopsySchedule::uniform(double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo)) {
    throw Error(ErrorKind::InvalidArgument, "uniform biopsy gaps need 0 < lo < hi");
  }
  return {Kind::RandomUniform, lo, hi};
}

BiopsySchedule BiopsySchedule::parse(const std::string& name) {
  if (name == "pass" || name == "PASS") return pass();
  if (name.size() > 1 && name[0] == 'u') {
    const auto dash = name.find('-', 1);
    if (dash != std::string::npos) {
      try {
        std::size_t used_lo = 0;
        std::size_t used_hi = 0;
        const std::string lo_s = name.substr(1, dash - 1);
        const std::string hi_s = name.substr(dash + 1);
        const double lo = std::stod(lo_s, &used_lo);
        const double hi = std::stod(hi_s, &used_hi);
        if (used_lo == lo_s.size() && used_hi == hi_s.size()) return uniform(lo, hi);
      } catch (const std::logic_error&) {
      }
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown biopsy schedule '" + name + "' (use pass or u<lo>-<hi>)");
}

std::string BiopsySchedule::name() const {
  if (kind == Kind::Pass) return "pass";
  char buf[64];
  std::snprintf(buf, sizeof buf, "u%g-%g", lo, hi);
  return buf;
}

void SimulationConfig::validate() const {
  if (n_subjects < 1) throw Error(ErrorKind::InvalidArgument, "n_subjects must be >= 1");
  if (!(psa_interval > 0.0)) throw Error(ErrorKind::InvalidArgument, "psa_interval must be > 0");
  if (!(censoring_rate >= 0.0)) throw Error(ErrorKind::InvalidArgument, "censoring_rate must be >= 0");
  if (!(admin_horizon > 0.0)) throw Error(ErrorKind::InvalidArgument, "admin_horizon must be > 0");
  if (schedule.kind == BiopsySchedule::Kind::RandomUniform && !(schedule.hi > schedule.lo && schedule.lo > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "uniform biopsy gaps need 0 < lo < hi");
  }
  params.validate();
}

Rng subject_stream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t subject) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate), static_cast<std::uint32_t>(replicate >> 32),
                    static_cast<std::uint32_t>(subject), static_cast<std::uint32_t>(subject >> 32)};
  return Rng(seq);
}

namespace {

template <class Dist>
double draw_truncated(Rng& rng, Dist& dist, double lo, double hi) {
  for (;;) {
    const double x = dist(rng);
    if (x >= lo && x <= hi) return x;
  }
}

}  // namespace

SubjectProfile draw_subject_profile(Rng& rng, const ModelParameters& params) {
  SubjectProfile p;
  std::normal_distribution<double> age(62.0, 7.0);
  p.age = draw_truncated(rng, age, 45.0, 80.0);
  std::lognormal_distribution<double> density(std::log(0.1), 0.5);
  p.density = draw_truncated(rng, density, 0.01, 1.0);

  const Eigen::Matrix4d chol = Eigen::LLT<Eigen::Matrix4d>(params.omega).matrixL();
  std::normal_distribution<double> z;
  Eigen::Vector4d zs;
  for (int i = 0; i < 4; ++i) zs(i) = z(rng);
  const Eigen::Vector4d u = chol * zs;
  for (int i = 0; i < 4; ++i) p.u[static_cast<std::size_t>(i)] = u(i);
  return p;
}

double invert_cumulative_hazard(const JointModel& model, const SubjectProfile& profile, Cause k, double target,
                                double cap, bool* capped) {
  if (capped) *capped = false;
  auto h = [&](double x) { return model.hazard(profile, x, k); };
  double acc = 0.0;
  for (double a = 0.0; a < cap; a += 1.0) {
    const double b = std::min(a + 1.0, cap);
    const double panel = QuadratureRule::integrate_panel(h, a, b);
    if (acc + panel >= target) {
      double lo = a;
      double hi = b;
      while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (acc + QuadratureRule::integrate_panel(h, a, mid) >= target) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    acc += panel;
  }
  if (capped) *capped = true;
  return cap;
}

EventTimeDraw sample_event_times(const SubjectProfile& profile, const JointModel& model, Rng& rng, double cap) {
  std::exponential_distribution<double> unit_exp(1.0);
  const double e_prg = unit_exp(rng);
  const double e_trt = unit_exp(rng);
  EventTimeDraw out;
  out.times.t_prg_star = invert_cumulative_hazard(model, profile, Cause::Progression, e_prg, cap,
                                                  &out.capped_progression);
  out.times.t_trt_star = invert_cumulative_hazard(model, profile, Cause::Treatment, e_trt, cap,
                                                  &out.capped_treatment);
  return out;
}

std::vector<double> generate_biopsy_times(const BiopsySchedule& schedule, Rng& rng, double horizon) {
  if (!(horizon > 0.0)) throw Error(ErrorKind::InvalidArgument, "biopsy horizon must be > 0");
  std::vector<double> out;
  if (schedule.kind == BiopsySchedule::Kind::Pass) {
    // Months 12 and 24, then every second year.
    for (double t : {1.0, 2.0}) {
      if (t <= horizon) out.push_back(t);
    }
    for (double t = 4.0; t <= horizon; t += 2.0) out.push_back(t);
    return out;
  }
  std::uniform_real_distribution<double> gap(schedule.lo, schedule.hi);
  for (double t = gap(rng); t <= horizon; t += gap(rng)) out.push_back(t);
  return out;
}

SubjectRecord observe_subject(const TrueOutcome& truth, std::span<const double> biopsies, double censoring_time) {
  const double inf = std::numeric_limits<double>::infinity();
  auto last_before = [&](double x) {
    double last = 0.0;
    for (double b : biopsies) {
      if (b < x) last = std::max(last, b);
    }
    return last;
  };
  double detect = inf;
  for (double b : biopsies) {
    if (b >= truth.t_prg_star) {
      detect = std::min(detect, b);
    }
  }

  SubjectRecord r;
  if (truth.t_trt_star < std::min(detect, censoring_time)) {
    r.delta = EventKind::Treatment;
    r.t_trt = truth.t_trt_star;
    r.t_last_neg = last_before(truth.t_trt_star);
  } else if (detect < censoring_time && detect < truth.t_trt_star) {
    r.delta = EventKind::Progression;
    r.t_pos = detect;
    r.t_last_neg = last_before(detect);
  } else {
    r.delta = EventKind::Censored;
    r.t_cen = censoring_time;
    r.t_last_neg = last_before(censoring_time);
  }
  return r;
}

std::vector<PsaObservation> simulate_psa_series(const SubjectProfile& profile, const JointModel& model,
                                                std::span<const double> times, Rng& rng, double noise_scale) {
  std::student_t_distribution<double> t3(3.0);
  std::vector<PsaObservation> out;
  out.reserve(times.size());
  for (double t : times) {
    const double eps = noise_scale > 0.0 ? noise_scale * t3(rng) : 0.0;
    out.push_back({t, model.longitudinal_mean(profile, t) + eps});
  }
  return out;
}

std::vector<SimulatedSubject> generate_dataset(const SimulationConfig& config, std::size_t replicate,
                                               Execution exec) {
  config.validate();
  const JointModel model(config.params);
  const double noise = config.psa_noise ? 1.0 / std::sqrt(config.params.tau_eps) : 0.0;
  std::vector<SimulatedSubject> out(config.n_subjects);

  for_each_index(config.n_subjects, exec, [&](std::size_t i) {
    Rng rng = subject_stream(config.seed, replicate, i);
    SimulatedSubject s;
    s.profile = draw_subject_profile(rng, config.params);
    s.truth = sample_event_times(s.profile, model, rng).times;

    double cen = config.admin_horizon;
    if (config.censoring_rate > 0.0) {
      std::exponential_distribution<double> dropout(config.censoring_rate);
      cen = std::min(cen, dropout(rng));
    }
    const auto biopsies = generate_biopsy_times(config.schedule, rng, config.admin_horizon);
    s.record = observe_subject(s.truth, biopsies, cen);

    char id[32];
    std::snprintf(id, sizeof id, "S%05zu", i + 1);
    s.record.id = id;
    s.record.age = s.profile.age;
    s.record.density = s.profile.density;

    const double end = s.record.endpoint();
    std::vector<double> grid;
    for (std::size_t k = 0;; ++k) {
      const double t = static_cast<double>(k) * config.psa_interval;
      if (t > end) break;
      grid.push_back(t);
    }
    s.record.psa = simulate_psa_series(s.profile, model, grid, rng, noise);
    out[i] = std::move(s);
  });
  return out;
}

}  // namespace icm
