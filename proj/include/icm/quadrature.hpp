#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace icm {

/// 15-point Gauss-Kronrod rule on [-1, 1] (QUADPACK qk15 abscissae/weights),
/// applied piecewise: an interval is cut into ceil(length / panel_width)
/// equal panels.
struct QuadratureRule {
  // Non-negative half of the symmetric node set; index 7 is the centre.
  static constexpr std::array<double, 8> kNodes = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> kWeights = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  // Embedded 7-point Gauss weights for nodes 1, 3, 5, 7.
  static constexpr std::array<double, 4> kGaussWeights = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  double panel_width = 1.0;

  std::size_t panels(double a, double b) const {
    const double len = b - a;
    if (!(len > 0.0)) return 0;
    return static_cast<std::size_t>(std::max(1.0, std::ceil(len / panel_width - 1e-12)));
  }

  /// Calls visit(x, w) for the 15 mapped nodes of one panel [a, b].
  template <class Visit>
  static void for_each_node(double a, double b, Visit&& visit) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < 7; ++i) {
      const double dx = half * kNodes[i];
      visit(mid - dx, half * kWeights[i]);
      visit(mid + dx, half * kWeights[i]);
    }
    visit(mid, half * kWeights[7]);
  }

  /// Single-panel Kronrod estimate.
  template <class F>
  static double integrate_panel(F&& f, double a, double b) {
    double sum = 0.0;
    for_each_node(a, b, [&](double x, double w) { sum += w * f(x); });
    return sum;
  }

  /// |Kronrod - Gauss| on one panel, a cheap error indicator.
  template <class F>
  static double panel_error(F&& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double gk = kWeights[7] * f(mid);
    double g = kGaussWeights[3] * f(mid);
    for (std::size_t i = 0; i < 7; ++i) {
      const double dx = half * kNodes[i];
      const double fsum = f(mid - dx) + f(mid + dx);
      gk += kWeights[i] * fsum;
      if (i % 2 == 1) g += kGaussWeights[i / 2] * fsum;
    }
    return std::abs(half * (gk - g));
  }

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const std::size_t n = panels(a, b);
    if (n == 0) return 0.0;
    const double h = (b - a) / static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = a + h * static_cast<double>(j);
      const double hi = j + 1 == n ? b : lo + h;
      sum += integrate_panel(f, lo, hi);
    }
    return sum;
  }
};

}  // namespace icm
