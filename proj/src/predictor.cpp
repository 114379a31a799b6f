#include "icm/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "icm/error.hpp"

namespace icm {

namespace {

std::vector<double> equidistant_interior(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 1; i <= n; ++i) out.push_back(lo + (hi - lo) * i / (n + 1));
  return out;
}

}  // namespace

ModelParameters ModelParameters::reference() {
  ModelParameters p;
  p.beta = {2.34, 0.28, 0.61, 0.95, 0.02};
  p.omega << 0.48, -0.04, -0.07, 0.02,
             -0.04, 0.77, 0.46, -0.04,
             -0.07, 0.46, 1.37, 1.36,
             0.02, -0.04, 1.36, 2.54;
  p.tau_eps = 47.40;
  p.gamma_h0.resize(12, 2);
  p.gamma_h0 << -6.78, -5.76,
                -4.72, -4.99,
                -2.84, -4.43,
                -1.65, -4.26,
                -1.54, -4.36,
                -1.79, -4.47,
                -1.85, -4.60,
                -1.75, -4.69,
                -1.85, -4.78,
                -2.04, -4.92,
                -2.18, -5.08,
                -2.32, -5.21;
  p.gamma = {0.50, 0.23};
  p.alpha << 0.13, 0.42,
             3.01, 2.62;
  p.ns_knots = {0.0, 10.0, {1.0, 3.0}};
  p.bs_knots = {0.0, 10.0, equidistant_interior(0.0, 10.0, 8)};
  return p;
}

ModelParameters ModelParameters::constant_hazards(double lambda_prg, double lambda_trt) {
  if (!(lambda_prg > 0.0) || !(lambda_trt > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "constant hazards must be positive");
  }
  ModelParameters p = reference();
  p.beta = {0.0, 0.0, 0.0, 0.0, 0.0};
  p.gamma_h0.col(0).setConstant(std::log(lambda_prg));
  p.gamma_h0.col(1).setConstant(std::log(lambda_trt));
  p.gamma = {0.0, 0.0};
  p.alpha.setZero();
  return p;
}

void ModelParameters::validate() const {
  if (!(tau_eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau_eps must be > 0");
  if (!omega.isApprox(omega.transpose(), 1e-12)) {
    throw Error(ErrorKind::InvalidArgument, "omega must be symmetric");
  }
  if (Eigen::LLT<Eigen::Matrix4d>(omega).info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument, "omega must be positive definite");
  }
  const auto expected = static_cast<Eigen::Index>(bs_knots.interior.size() + 4);
  if (gamma_h0.rows() != expected) {
    throw Error(ErrorKind::InvalidArgument, "gamma_h0 needs " + std::to_string(expected) +
                                                " rows for the baseline knot set, got " +
                                                std::to_string(gamma_h0.rows()));
  }
  if (!gamma_h0.allFinite() || !alpha.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "non-finite hazard coefficients");
  }
}

ModelParameters with_hazard_scale(ModelParameters p, double factor) {
  if (!(factor > 0.0)) throw Error(ErrorKind::InvalidArgument, "hazard scale must be > 0");
  p.gamma_h0.array() += std::log(factor);
  return p;
}

ModelParameters without_density_effect(ModelParameters p) {
  p.gamma = {0.0, 0.0};
  return p;
}

namespace {

nlohmann::json knots_json(const KnotSet& k) {
  return {{"boundary", {k.lower, k.upper}}, {"interior", k.interior}};
}

KnotSet knots_from(const nlohmann::json& j) {
  KnotSet k;
  const auto b = j.at("boundary").get<std::vector<double>>();
  if (b.size() != 2) throw Error(ErrorKind::Parse, "knot boundary needs two values");
  k.lower = b[0];
  k.upper = b[1];
  k.interior = j.at("interior").get<std::vector<double>>();
  return k;
}

}  // namespace

std::string to_json(const ModelParameters& p) {
  nlohmann::json j;
  j["beta"] = p.beta;
  auto omega = nlohmann::json::array();
  for (int r = 0; r < 4; ++r) omega.push_back({p.omega(r, 0), p.omega(r, 1), p.omega(r, 2), p.omega(r, 3)});
  j["omega"] = omega;
  j["tau_eps"] = p.tau_eps;
  auto gh = nlohmann::json::array();
  for (Eigen::Index r = 0; r < p.gamma_h0.rows(); ++r) gh.push_back({p.gamma_h0(r, 0), p.gamma_h0(r, 1)});
  j["gamma_h0"] = gh;
  j["gamma"] = p.gamma;
  j["alpha"] = {{p.alpha(0, 0), p.alpha(0, 1)}, {p.alpha(1, 0), p.alpha(1, 1)}};
  j["ns_knots"] = knots_json(p.ns_knots);
  j["bs_knots"] = knots_json(p.bs_knots);
  return j.dump(2);
}

ModelParameters parameters_from_json(const std::string& text) {
  ModelParameters p;
  try {
    const auto j = nlohmann::json::parse(text);
    const auto beta = j.at("beta").get<std::vector<double>>();
    if (beta.size() != 5) throw Error(ErrorKind::Parse, "beta needs 5 values");
    std::copy(beta.begin(), beta.end(), p.beta.begin());
    const auto omega = j.at("omega").get<std::vector<std::vector<double>>>();
    if (omega.size() != 4) throw Error(ErrorKind::Parse, "omega must be 4x4");
    for (int r = 0; r < 4; ++r) {
      if (omega[r].size() != 4) throw Error(ErrorKind::Parse, "omega must be 4x4");
      for (int c = 0; c < 4; ++c) p.omega(r, c) = omega[r][c];
    }
    p.tau_eps = j.at("tau_eps").get<double>();
    const auto gh = j.at("gamma_h0").get<std::vector<std::vector<double>>>();
    p.gamma_h0.resize(static_cast<Eigen::Index>(gh.size()), 2);
    for (std::size_t r = 0; r < gh.size(); ++r) {
      if (gh[r].size() != 2) throw Error(ErrorKind::Parse, "gamma_h0 rows need 2 values");
      p.gamma_h0(static_cast<Eigen::Index>(r), 0) = gh[r][0];
      p.gamma_h0(static_cast<Eigen::Index>(r), 1) = gh[r][1];
    }
    const auto gamma = j.at("gamma").get<std::vector<double>>();
    if (gamma.size() != 2) throw Error(ErrorKind::Parse, "gamma needs 2 values");
    p.gamma = {gamma[0], gamma[1]};
    const auto alpha = j.at("alpha").get<std::vector<std::vector<double>>>();
    if (alpha.size() != 2 || alpha[0].size() != 2 || alpha[1].size() != 2) {
      throw Error(ErrorKind::Parse, "alpha must be 2x2");
    }
    p.alpha << alpha[0][0], alpha[0][1], alpha[1][0], alpha[1][1];
    p.ns_knots = knots_from(j.at("ns_knots"));
    p.bs_knots = knots_from(j.at("bs_knots"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("model parameters: ") + e.what());
  }
  p.validate();
  return p;
}

std::string parameters_hash(const ModelParameters& p) {
  // FNV-1a over the canonical JSON text.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : to_json(p)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

JointModel::JointModel(ModelParameters params, QuadratureRule rule)
    : params_(std::move(params)),
      rule_(rule),
      ns_(params_.ns_knots.lower, params_.ns_knots.upper, params_.ns_knots.interior),
      bs_(params_.bs_knots.lower, params_.bs_knots.upper, params_.bs_knots.interior, 4) {
  params_.validate();
}

double JointModel::log_baseline(double time, Cause k) const {
  std::array<double, BSplineBasis::kMaxKnots> buf{};
  std::span<double> basis(buf.data(), bs_.size());
  bs_.evaluate(time, basis);
  const auto col = static_cast<Eigen::Index>(k);
  double s = 0.0;
  for (std::size_t a = 0; a < basis.size(); ++a) s += basis[a] * params_.gamma_h0(static_cast<Eigen::Index>(a), col);
  return s;
}

double JointModel::longitudinal_mean(const SubjectProfile& s, double time) const {
  const auto c = ns_.evaluate(time);
  const auto& b = params_.beta;
  double m = b[0] + s.u[0] + b[4] * (s.age - 62.0);
  for (std::size_t p = 0; p < 3; ++p) m += (b[p + 1] + s.u[p + 1]) * c[p];
  return m;
}

HazardPair JointModel::hazards(const SubjectProfile& s, double time) const {
  if (time < 0.0 || !std::isfinite(time)) {
    throw Error(ErrorKind::OutOfSupport, "hazard at negative time " + std::to_string(time));
  }
  const double tb = std::min(time, bs_.upper());
  std::array<double, BSplineBasis::kMaxKnots> buf{};
  std::span<double> basis(buf.data(), bs_.size());
  bs_.evaluate(tb, basis);
  double lp = 0.0;
  double lt = 0.0;
  for (std::size_t a = 0; a < basis.size(); ++a) {
    lp += basis[a] * params_.gamma_h0(static_cast<Eigen::Index>(a), 0);
    lt += basis[a] * params_.gamma_h0(static_cast<Eigen::Index>(a), 1);
  }
  const double m = longitudinal_mean(s, time);
  const double slope = m - longitudinal_mean(s, time - 1.0);
  const auto& al = params_.alpha;
  lp += params_.gamma[0] * s.density + al(0, 0) * m + al(1, 0) * slope;
  lt += params_.gamma[1] * s.density + al(0, 1) * m + al(1, 1) * slope;
  return {std::exp(lp), std::exp(lt)};
}

double JointModel::hazard(const SubjectProfile& s, double time, Cause k) const {
  const auto h = hazards(s, time);
  return k == Cause::Progression ? h.progression : h.treatment;
}

double JointModel::cumulative_hazard(const SubjectProfile& s, Cause k, double from, double to) const {
  if (to < from) throw Error(ErrorKind::InvalidArgument, "cumulative hazard needs from <= to");
  double total = 0.0;
  for_each_segment(from, to, [&](double a, double b) {
    total += rule_.integrate([&](double x) { return hazard(s, x, k); }, a, b);
  });
  return total;
}

// Outer quadrature over [r, s] of h_k(v) exp(-H(r, v)); the inner cumulative
// hazard restarts at each outer panel from the accumulated panel totals, so
// every inner integral spans at most one panel.
double JointModel::cif(const SubjectProfile& s, Cause k, double horizon, double conditioning) const {
  if (horizon < conditioning) throw Error(ErrorKind::InvalidArgument, "cif needs horizon >= conditioning");
  const auto total_hazard = [&](double x) {
    const auto h = hazards(s, x);
    return h.progression + h.treatment;
  };
  double acc = 0.0;
  double h_before = 0.0;
  for_each_segment(conditioning, horizon, [&](double from, double to) {
    const std::size_t n = rule_.panels(from, to);
    if (n == 0) return;
    const double width = (to - from) / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double a = from + width * static_cast<double>(j);
      const double b = j + 1 == n ? to : a + width;
      QuadratureRule::for_each_node(a, b, [&](double v, double w) {
        const double inner = QuadratureRule::integrate_panel(total_hazard, a, v);
        const auto hv = hazards(s, v);
        const double hk = k == Cause::Progression ? hv.progression : hv.treatment;
        acc += w * hk * std::exp(-(h_before + inner));
      });
      h_before += QuadratureRule::integrate_panel(total_hazard, a, b);
    }
  });
  return std::clamp(acc, 0.0, 1.0);
}

double JointModel::overall_survival(const SubjectProfile& s, double horizon, double conditioning) const {
  if (horizon < conditioning) throw Error(ErrorKind::InvalidArgument, "survival needs horizon >= conditioning");
  double total = 0.0;
  for_each_segment(conditioning, horizon, [&](double a, double b) {
    total += rule_.integrate(
        [&](double x) {
          const auto h = hazards(s, x);
          return h.progression + h.treatment;
        },
        a, b);
  });
  return std::exp(-total);
}

ConstantHazardPredictor::ConstantHazardPredictor(double lambda_prg, double lambda_trt)
    : lambda_prg_(lambda_prg), lambda_trt_(lambda_trt) {
  if (!(lambda_prg >= 0.0) || !(lambda_trt >= 0.0) || !(lambda_prg + lambda_trt > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "constant hazards must be non-negative with positive sum");
  }
}

double ConstantHazardPredictor::cif(const SubjectProfile&, double s, double r) const {
  const double total = lambda_prg_ + lambda_trt_;
  return lambda_prg_ / total * -std::expm1(-total * (s - r));
}

double ConstantHazardPredictor::cif_treatment(const SubjectProfile&, double s, double r) const {
  const double total = lambda_prg_ + lambda_trt_;
  return lambda_trt_ / total * -std::expm1(-total * (s - r));
}

double ConstantHazardPredictor::surv(const SubjectProfile&, double s, double r) const {
  return std::exp(-(lambda_prg_ + lambda_trt_) * (s - r));
}

}  // namespace icm
