#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace icm {

/// Clamped B-spline basis of a given order (order 4 = cubic) on
/// [boundary_lo, boundary_hi] with the given interior knots. The right
/// boundary is included in the last knot span.
class BSplineBasis {
 public:
  static constexpr std::size_t kMaxKnots = 40;

  BSplineBasis(double lo, double hi, std::vector<double> interior, int order = 4);

  std::size_t size() const { return full_knots_.size() - static_cast<std::size_t>(order_); }
  int order() const { return order_; }
  double lower() const { return lo_; }
  double upper() const { return hi_; }
  const std::vector<double>& interior() const { return interior_; }

  /// Basis values (deriv = 0) or their derivatives at x, which must lie in
  /// [lower(), upper()]; out.size() == size().
  void evaluate(double x, std::span<double> out, int deriv = 0) const;
  std::vector<double> evaluate(double x, int deriv = 0) const;

 private:
  void evaluate_order(double x, int order, int deriv, std::span<double> out) const;

  double lo_;
  double hi_;
  std::vector<double> interior_;
  int order_;
  std::vector<double> full_knots_;
};

/// Natural cubic spline basis without intercept, built the way R's
/// splines::ns() builds it: cubic B-splines, first column dropped, projected
/// onto the null space of the second-derivative constraints at both
/// boundary knots. Outside the boundary knots the basis continues linearly.
class NaturalSplineBasis {
 public:
  static constexpr std::size_t kDf = 3;

  NaturalSplineBasis(double lo, double hi, std::vector<double> interior);

  std::array<double, kDf> evaluate(double x) const;

  const BSplineBasis& bspline() const { return bs_; }

 private:
  std::array<double, kDf> project(std::span<const double> raw) const;

  BSplineBasis bs_;
  Eigen::MatrixXd projection_;  // (n_bspline - 1) x kDf
  std::vector<double> value_lo_, slope_lo_, value_hi_, slope_hi_;
};

}  // namespace icm
