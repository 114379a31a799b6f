#include "icm/splines.hpp"

#include <algorithm>
#include <string>

#include "icm/error.hpp"

namespace icm {

BSplineBasis::BSplineBasis(double lo, double hi, std::vector<double> interior, int order)
    : lo_(lo), hi_(hi), interior_(std::move(interior)), order_(order) {
  if (!(hi > lo)) throw Error(ErrorKind::InvalidArgument, "spline boundary knots must satisfy lo < hi");
  if (order < 1) throw Error(ErrorKind::InvalidArgument, "spline order must be >= 1");
  std::sort(interior_.begin(), interior_.end());
  for (double k : interior_) {
    if (!(k > lo && k < hi)) {
      throw Error(ErrorKind::InvalidArgument, "interior knot " + std::to_string(k) + " outside boundary");
    }
  }
  full_knots_.assign(static_cast<std::size_t>(order), lo);
  full_knots_.insert(full_knots_.end(), interior_.begin(), interior_.end());
  full_knots_.insert(full_knots_.end(), static_cast<std::size_t>(order), hi);
  if (full_knots_.size() > kMaxKnots) throw Error(ErrorKind::InvalidArgument, "too many spline knots");
}

std::vector<double> BSplineBasis::evaluate(double x, int deriv) const {
  std::vector<double> out(size());
  evaluate(x, out, deriv);
  return out;
}

void BSplineBasis::evaluate(double x, std::span<double> out, int deriv) const {
  if (x < lo_ || x > hi_) {
    throw Error(ErrorKind::OutOfSupport,
                "x=" + std::to_string(x) + " outside [" + std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
  }
  if (out.size() != size()) throw Error(ErrorKind::InvalidArgument, "basis output has wrong size");
  if (deriv >= order_) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  evaluate_order(x, order_, deriv, out);
}

// Cox-de Boor recursion; derivatives through the order-lowering identity
// B'_{i,k} = (k-1) [B_{i,k-1}/(t_{i+k-1}-t_i) - B_{i+1,k-1}/(t_{i+k}-t_{i+1})].
void BSplineBasis::evaluate_order(double x, int order, int deriv, std::span<double> out) const {
  const auto& t = full_knots_;
  const std::size_t n = t.size() - static_cast<std::size_t>(order);

  if (deriv > 0) {
    std::vector<double> lower(n + 1);
    evaluate_order(x, order - 1, deriv - 1, lower);
    const double k1 = order - 1;
    for (std::size_t i = 0; i < n; ++i) {
      const double d1 = t[i + order - 1] - t[i];
      const double d2 = t[i + order] - t[i + 1];
      const double a = d1 > 0.0 ? lower[i] / d1 : 0.0;
      const double b = d2 > 0.0 ? lower[i + 1] / d2 : 0.0;
      out[i] = k1 * (a - b);
    }
    return;
  }

  // Order-1 indicator of the span containing x; x == hi goes to the last
  // non-empty span.
  const std::size_t m = t.size() - 1;
  std::array<double, kMaxKnots> b{};
  std::size_t span = 0;
  if (x >= hi_) {
    span = m - 1;
    while (span > 0 && !(t[span] < t[span + 1])) --span;
  } else {
    span = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
  }
  b[span] = 1.0;
  for (int k = 2; k <= order; ++k) {
    for (std::size_t i = 0; i + k <= m; ++i) {
      double v = 0.0;
      const double d1 = t[i + k - 1] - t[i];
      const double d2 = t[i + k] - t[i + 1];
      if (d1 > 0.0) v += (x - t[i]) / d1 * b[i];
      if (d2 > 0.0) v += (t[i + k] - x) / d2 * b[i + 1];
      b[i] = v;
    }
  }
  std::copy_n(b.begin(), n, out.begin());
}

NaturalSplineBasis::NaturalSplineBasis(double lo, double hi, std::vector<double> interior)
    : bs_(lo, hi, std::move(interior), 4) {
  const std::size_t nb = bs_.size();
  if (nb - 1 != kDf + 2) {
    throw Error(ErrorKind::InvalidArgument, "natural spline needs exactly 2 interior knots for 3 df");
  }
  // Constraint rows: second derivatives at both boundaries, intercept column dropped.
  const auto c_lo = bs_.evaluate(lo, 2);
  const auto c_hi = bs_.evaluate(hi, 2);
  Eigen::MatrixXd constraint_t(nb - 1, 2);
  for (std::size_t i = 1; i < nb; ++i) {
    constraint_t(static_cast<Eigen::Index>(i - 1), 0) = c_lo[i];
    constraint_t(static_cast<Eigen::Index>(i - 1), 1) = c_hi[i];
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(constraint_t);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(nb - 1, nb - 1);
  projection_ = q.rightCols(static_cast<Eigen::Index>(kDf));

  value_lo_ = bs_.evaluate(lo, 0);
  slope_lo_ = bs_.evaluate(lo, 1);
  value_hi_ = bs_.evaluate(hi, 0);
  slope_hi_ = bs_.evaluate(hi, 1);
}

std::array<double, NaturalSplineBasis::kDf> NaturalSplineBasis::project(std::span<const double> raw) const {
  std::array<double, kDf> out{};
  for (std::size_t j = 0; j < kDf; ++j) {
    double s = 0.0;
    for (std::size_t i = 1; i < raw.size(); ++i) {
      s += raw[i] * projection_(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j));
    }
    out[j] = s;
  }
  return out;
}

std::array<double, NaturalSplineBasis::kDf> NaturalSplineBasis::evaluate(double x) const {
  const std::size_t nb = bs_.size();
  std::array<double, 8> buf{};
  std::span<double> raw(buf.data(), nb);
  if (x < bs_.lower() || x > bs_.upper()) {
    const bool below = x < bs_.lower();
    const auto& v = below ? value_lo_ : value_hi_;
    const auto& s = below ? slope_lo_ : slope_hi_;
    const double dx = x - (below ? bs_.lower() : bs_.upper());
    for (std::size_t i = 0; i < nb; ++i) raw[i] = v[i] + s[i] * dx;
  } else {
    bs_.evaluate(x, raw, 0);
  }
  return project(raw);
}

}  // namespace icm
