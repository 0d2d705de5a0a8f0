#pragma once

// Closed forms for the scaling ratio, the width recurrence and the Hausdorff
// dimension as functions of the drawing angle.
//
// The chord widths along the scaling subsequence obey
//   w_k = 2(1 + cos a) w_{k-1} + w_{k-2},   h_k = h_{k-1} + sin(a) w_{k-1},
// with characteristic polynomial r^2 - 2(1 + cos a) r - 1. Its positive root
// r+ is the growth factor per step (three word orders) and R = 1/r+.

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "fibfrac/error.hpp"

namespace fibfrac {

namespace detail {

inline void check_analysis_angle(double alpha) {
  require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= std::numbers::pi / 2 + 1e-15,
          "angle must lie in [0, pi/2]");
}

}  // namespace detail

struct CharacteristicRoots {
  double plus = 0.0;
  double minus = 0.0;
};

inline CharacteristicRoots characteristic_roots(double alpha) {
  detail::check_analysis_angle(alpha);
  const double c = 1.0 + std::cos(alpha);
  const double disc = std::sqrt(c * c + 1.0);
  // r- = -1/r+ avoids cancellation in c - disc
  return {c + disc, -1.0 / (c + disc)};
}

inline double scaling_ratio(double alpha) { return 1.0 / characteristic_roots(alpha).plus; }

/// (r+ - 1) / sin(alpha); +inf at alpha = 0 where the height vanishes.
inline double aspect_limit(double alpha) {
  detail::check_analysis_angle(alpha);
  const double s = std::sin(alpha);
  if (s == 0.0) return std::numeric_limits<double>::infinity();
  return (characteristic_roots(alpha).plus - 1.0) / s;
}

/// s with 4 R^s + R^{2s} = 1, i.e. R^s = sqrt(5) - 2.
inline double hausdorff_dimension(double alpha) {
  const double r_plus = characteristic_roots(alpha).plus;
  // ln(sqrt5 - 2) / ln R == ln(2 + sqrt5) / ln r+; the second form is exactly 1
  // at alpha = 0 because r+ is then computed as 2 + sqrt(5).
  return std::log(2.0 + std::sqrt(5.0)) / std::log(r_plus);
}

/// 4 R^s + R^{2s} - 1 at s = hausdorff_dimension(alpha).
inline double dimension_residual(double alpha) {
  const double R = scaling_ratio(alpha);
  const double rs = std::pow(R, hausdorff_dimension(alpha));
  return 4.0 * rs + rs * rs - 1.0;
}

struct ScalingProfile {
  double alpha = 0.0;
  double ratio = 0.0;    // R
  double r_plus = 0.0;   // 1/R
  double r_minus = 0.0;  // -R
  double aspect = 0.0;   // aspect_limit, +inf at 0
  double dimension = 0.0;
};

inline ScalingProfile scaling_profile(double alpha) {
  const auto roots = characteristic_roots(alpha);
  return {alpha, 1.0 / roots.plus, roots.plus, roots.minus, aspect_limit(alpha), hausdorff_dimension(alpha)};
}

struct WidthHeight {
  double width = 0.0;
  double height = 0.0;
};

struct WidthHeightSeries {
  std::vector<WidthHeight> terms;  // terms[0] is k = 1
  double coeff_plus = 0.0;         // w_k = coeff_plus r+^k + coeff_minus r-^k
  double coeff_minus = 0.0;

  double closed_form_width(int k) const {
    return coeff_plus * std::pow(r_plus, k) + coeff_minus * std::pow(r_minus, k);
  }
  double r_plus = 0.0;
  double r_minus = 0.0;
};

/// Streams the width/height recurrences from seeds (w_1, w_2, h_1) up to k_max
/// and fits the closed form a r+^k + b r-^k to the two width seeds.
inline WidthHeightSeries wh_sequence(double alpha, double w1, double w2, double h1, int k_max) {
  detail::check_analysis_angle(alpha);
  detail::require(w1 > 0 && w2 > 0, "width seeds must be positive");
  detail::require(h1 >= 0, "height seed must be non-negative");
  detail::require(k_max >= 2, "k_max must be >= 2");
  const double c = std::cos(alpha), s = std::sin(alpha);
  WidthHeightSeries out;
  out.terms.reserve(static_cast<std::size_t>(k_max));
  out.terms.push_back({w1, h1});
  out.terms.push_back({w2, h1 + s * w1});
  for (int k = 3; k <= k_max; ++k) {
    const auto& a = out.terms[static_cast<std::size_t>(k - 2)];
    const auto& b = out.terms[static_cast<std::size_t>(k - 3)];
    out.terms.push_back({2 * a.width + b.width + 2 * c * a.width, a.height + s * a.width});
  }
  const auto roots = characteristic_roots(alpha);
  out.r_plus = roots.plus;
  out.r_minus = roots.minus;
  // [r+ r-; r+^2 r-^2] [a; b] = [w1; w2]
  const double p = roots.plus, m = roots.minus;
  const double det = p * m * m - m * p * p;
  out.coeff_plus = (w1 * m * m - m * w2) / det;
  out.coeff_minus = (p * w2 - p * p * w1) / det;
  return out;
}

}  // namespace fibfrac
