#pragma once

#include <array>
#include <string>

#include <Eigen/Dense>

#include "icm/quadrature.hpp"
#include "icm/splines.hpp"

namespace icm {

enum class Cause : int { Progression = 0, Treatment = 1 };

struct KnotSet {
  double lower = 0.0;
  double upper = 10.0;
  std::vector<double> interior;
};

/// Joint-model parameters: PSA trajectory (beta, omega, tau_eps) and the two
/// cause-specific hazards (gamma_h0 baseline spline coefficients, gamma for
/// PSA density, alpha for current value / yearly change of the PSA mean).
struct ModelParameters {
  std::array<double, 5> beta{};
  Eigen::Matrix4d omega = Eigen::Matrix4d::Identity();
  double tau_eps = 1.0;
  Eigen::MatrixX2d gamma_h0;           // one row per B-spline basis function
  std::array<double, 2> gamma{};       // indexed by Cause
  Eigen::Matrix2d alpha = Eigen::Matrix2d::Zero();  // row 0: value, row 1: slope; column: Cause
  KnotSet ns_knots;
  KnotSet bs_knots;

  /// Posterior means of the reference active-surveillance joint model.
  static ModelParameters reference();

  /// Hazard-free trajectory with constant cause-specific hazards; used to
  /// cross-check the quadrature path against closed forms.
  static ModelParameters constant_hazards(double lambda_prg, double lambda_trt);

  void validate() const;
};

ModelParameters with_hazard_scale(ModelParameters p, double factor);
ModelParameters without_density_effect(ModelParameters p);

std::string to_json(const ModelParameters& p);
ModelParameters parameters_from_json(const std::string& text);
std::string parameters_hash(const ModelParameters& p);

struct SubjectProfile {
  double age = 62.0;
  double density = 0.0;
  std::array<double, 4> u{};
};

struct HazardPair {
  double progression;
  double treatment;
};

/// Deterministic evaluation of the joint model for a given subject profile.
/// Immutable; safe to share across threads.
class JointModel {
 public:
  explicit JointModel(ModelParameters params, QuadratureRule rule = {});

  const ModelParameters& params() const { return params_; }
  const QuadratureRule& rule() const { return rule_; }

  std::array<double, 3> ns_basis(double time) const { return ns_.evaluate(time); }
  const BSplineBasis& baseline_basis() const { return bs_; }

  /// Log baseline hazard; throws OutOfSupport outside the B-spline knots.
  double log_baseline(double time, Cause k) const;

  double longitudinal_mean(const SubjectProfile& s, double time) const;

  /// Cause-specific hazards. Beyond the last baseline knot the log baseline
  /// is held at its boundary value; negative times are OutOfSupport.
  HazardPair hazards(const SubjectProfile& s, double time) const;
  double hazard(const SubjectProfile& s, double time, Cause k) const;

  double cumulative_hazard(const SubjectProfile& s, Cause k, double from, double to) const;

  /// Pr(event k by s, before the competing event | event-free at r).
  double cif(const SubjectProfile& s, Cause k, double horizon, double conditioning) const;
  double overall_survival(const SubjectProfile& s, double horizon, double conditioning) const;

 private:
  // Integration intervals are cut at the last baseline knot, where the
  // hazard has a kink.
  template <class Fn>
  void for_each_segment(double from, double to, Fn&& fn) const {
    const double kink = params_.bs_knots.upper;
    if (from < kink && kink < to) {
      fn(from, kink);
      fn(kink, to);
    } else {
      fn(from, to);
    }
  }

  ModelParameters params_;
  QuadratureRule rule_;
  NaturalSplineBasis ns_;
  BSplineBasis bs_;
};

/// Anything that can produce conditional progression risk and overall
/// survival for a subject.
class RiskPredictor {
 public:
  virtual ~RiskPredictor() = default;

  /// Progression cumulative incidence Pi(s | r).
  virtual double cif(const SubjectProfile& p, double s, double r) const = 0;
  virtual double cif_treatment(const SubjectProfile& p, double s, double r) const = 0;
  /// Overall survival S(s | r).
  virtual double surv(const SubjectProfile& p, double s, double r) const = 0;
};

class JointModelPredictor final : public RiskPredictor {
 public:
  explicit JointModelPredictor(ModelParameters params, QuadratureRule rule = {})
      : model_(std::move(params), rule) {}

  double cif(const SubjectProfile& p, double s, double r) const override {
    return model_.cif(p, Cause::Progression, s, r);
  }
  double cif_treatment(const SubjectProfile& p, double s, double r) const override {
    return model_.cif(p, Cause::Treatment, s, r);
  }
  double surv(const SubjectProfile& p, double s, double r) const override {
    return model_.overall_survival(p, s, r);
  }

  const JointModel& model() const { return model_; }

 private:
  JointModel model_;
};

/// Closed-form competing exponentials; ignores the profile.
class ConstantHazardPredictor final : public RiskPredictor {
 public:
  ConstantHazardPredictor(double lambda_prg, double lambda_trt);

  double cif(const SubjectProfile&, double s, double r) const override;
  double cif_treatment(const SubjectProfile&, double s, double r) const override;
  double surv(const SubjectProfile&, double s, double r) const override;

  double lambda_prg() const { return lambda_prg_; }
  double lambda_trt() const { return lambda_trt_; }

 private:
  double lambda_prg_;
  double lambda_trt_;
};

}  // namespace icm
