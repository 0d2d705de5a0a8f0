#pragma once

// Box-counting dimension estimate.
//
// Grids are anchored at the lower-left corner of the sample's bounding box;
// the estimate averages the counts over four grid offsets (0, 1/4, 1/2, 3/4
// of a cell along the diagonal) before fitting log N against log(1/eps).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "fibfrac/error.hpp"
#include "fibfrac/geometry.hpp"
#include "fibfrac/hausdorff.hpp"

namespace fibfrac {

/// Number of cells of side eps (grid anchored at `anchor`) holding a point.
inline std::uint64_t box_count(std::span<const Vec2> pts, double eps, Vec2 anchor) {
  detail::require(eps > 0 && std::isfinite(eps), "box size must be positive");
  if (pts.empty()) return 0;
  std::int64_t min_i = INT64_MAX, min_j = INT64_MAX, max_i = INT64_MIN, max_j = INT64_MIN;
  std::vector<std::int64_t> ij(2 * pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto i = static_cast<std::int64_t>(std::floor((pts[k].x - anchor.x) / eps));
    const auto j = static_cast<std::int64_t>(std::floor((pts[k].y - anchor.y) / eps));
    ij[2 * k] = i;
    ij[2 * k + 1] = j;
    min_i = std::min(min_i, i), max_i = std::max(max_i, i);
    min_j = std::min(min_j, j), max_j = std::max(max_j, j);
  }
  const auto w = static_cast<std::uint64_t>(max_i - min_i + 1), h = static_cast<std::uint64_t>(max_j - min_j + 1);
  if (w <= (std::uint64_t{1} << 31) && h <= (std::uint64_t{1} << 31) && w * h <= (std::uint64_t{1} << 28)) {
    std::vector<bool> seen(w * h, false);
    std::uint64_t n = 0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const std::uint64_t c = static_cast<std::uint64_t>(ij[2 * k + 1] - min_j) * w +
                              static_cast<std::uint64_t>(ij[2 * k] - min_i);
      if (!seen[c]) {
        seen[c] = true;
        ++n;
      }
    }
    return n;
  }
  std::vector<std::uint64_t> keys;
  keys.reserve(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k)
    keys.push_back((static_cast<std::uint64_t>(ij[2 * k + 1] - min_j) << 32) ^
                   static_cast<std::uint64_t>(ij[2 * k] - min_i));
  std::sort(keys.begin(), keys.end());
  return static_cast<std::uint64_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

/// Grid anchored at the bounding-box lower-left corner.
inline std::uint64_t box_count(std::span<const Vec2> pts, double eps) {
  if (pts.empty()) return 0;
  return box_count(pts, eps, bounds_of(pts).lo);
}

struct DimensionReport {
  double alpha = 0.0;
  double analytic_s = 0.0;
  double boxcount_s = 0.0;
  double fit_r2 = 0.0;
  double intercept = 0.0;
  std::vector<double> scales;  // strictly decreasing
  std::vector<double> counts;  // mean over the four offsets
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) mx += x[k], my += y[k];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

inline double mean_box_count(std::span<const Vec2> pts, double eps, Vec2 lo) {
  double total = 0;
  for (int q = 0; q < 4; ++q) {
    const double shift = 0.25 * q * eps;
    total += static_cast<double>(box_count(pts, eps, {lo.x - shift, lo.y - shift}));
  }
  return total / 4.0;
}

/// Slope of log N(eps) vs log(1/eps) over `levels` geometric scales in
/// [eps_min, eps_max].
inline DimensionReport box_counting_dimension(std::span<const Vec2> pts, double eps_max, double eps_min,
                                              int levels) {
  detail::require(!pts.empty(), "box counting needs points");
  detail::require(eps_max > eps_min && eps_min > 0, "need eps_max > eps_min > 0");
  if (levels < 5) throw DomainError("box counting needs at least five levels");
  const Vec2 lo = bounds_of(pts).lo;
  DimensionReport r;
  std::vector<double> x, y;
  const double step = std::log(eps_max / eps_min) / (levels - 1);
  for (int l = 0; l < levels; ++l) {
    const double eps = eps_max * std::exp(-step * l);
    const double n = mean_box_count(pts, eps, lo);
    r.scales.push_back(eps);
    r.counts.push_back(n);
    x.push_back(std::log(1.0 / eps));
    y.push_back(std::log(n));
  }
  const LineFit f = fit_line(x, y);
  r.boxcount_s = f.slope;
  r.intercept = f.intercept;
  r.fit_r2 = f.r2;
  return r;
}

struct ScaleRange {
  double eps_max = 0.0;
  double eps_min = 0.0;
};

/// eps_max = diameter / 8; eps_min is the smallest scale (halving from
/// eps_max) at which occupied cells still hold >= 4 samples on average, and
/// never below 4x the sample spacing: deterministic IFS samples put only the
/// two endpoints in each deepest cell, and counts saturate near that size.
inline ScaleRange default_scale_range(std::span<const Vec2> pts) {
  detail::require(pts.size() >= 2, "need at least two points");
  const Bounds b = bounds_of(pts);
  const double diam = b.diameter();
  if (!(diam > 0)) throw DegenerateError("point set has zero extent");
  ScaleRange s{diam / 8, diam / 8};
  const double total = static_cast<double>(pts.size());
  const double floor = 4.0 * sample_spacing(pts);
  for (double eps = diam / 8; eps > diam * 1e-9; eps *= 0.5) {
    if (eps < floor || total / static_cast<double>(box_count(pts, eps, b.lo)) < 4.0) break;
    s.eps_min = eps;
  }
  return s;
}

inline DimensionReport box_counting_dimension(std::span<const Vec2> pts, int levels = 12) {
  const ScaleRange s = default_scale_range(pts);
  if (!(s.eps_max > s.eps_min)) throw DomainError("sample too sparse for box counting");
  return box_counting_dimension(pts, s.eps_max, s.eps_min, levels);
}

}  // namespace fibfrac
