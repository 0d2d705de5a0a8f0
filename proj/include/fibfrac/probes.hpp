#pragma once

// Convergence and continuity probes in the canonical frame (first vertex at
// the origin, chord of length sqrt 2 along the derived chord direction).

#include <cmath>
#include <span>
#include <vector>

#include "fibfrac/box_count.hpp"
#include "fibfrac/error.hpp"
#include "fibfrac/hausdorff.hpp"
#include "fibfrac/ifs.hpp"
#include "fibfrac/turtle.hpp"

namespace fibfrac {

/// Vertices of `p` moved by the orientation-preserving similarity taking the
/// first vertex to 0 and the last to `chord`.
inline PointSet normalized_curve(const Polyline& p, Vec2 chord) {
  detail::require(p.points.size() >= 2, "curve needs two vertices");
  detail::require(!(p.points.front() == p.points.back()), "closed curve has no chord");
  const AffineMap m(detail::chord_normalizer(p.points.front(), p.points.back(), chord));
  PointSet out(p.points.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = m(p.points[k]);
  return out;
}

/// d_H(attractor at `depth`, normalized curve) / diameter of the attractor.
inline double ifs_reference_residual(const Ifs& f, const Polyline& p, int depth = 7) {
  const PointSet a = attractor(f, depth);
  const PointSet c = normalized_curve(p, f.chord);
  return hausdorff_distance(a, c) / bounds_of(a).diameter();
}

struct ConvergenceRow {
  int k = 0;
  int n = 0;            // compares orders n and n + 6
  double distance = 0.0;
};

struct ConvergenceReport {
  int i = 2;
  double alpha = 0.0;
  std::vector<ConvergenceRow> rows;
  double decay_rate = 0.0;  // fitted distance ratio per step of k
  bool strictly_decreasing = false;
};

/// d_H between normalized curves of orders n(k) and n(k) + 6 along the
/// scaling subsequence n(k) = scaling_order(i, k).
inline ConvergenceReport convergence_report(int i, double alpha, std::span<const int> ks,
                                            TurnParity parity = TurnParity::EvenLeft) {
  detail::require(!ks.empty(), "need at least one k");
  ConvergenceReport r;
  r.i = i;
  r.alpha = alpha;
  const Vec2 chord = derive_ifs(i, alpha, 0, parity).chord;
  for (int k : ks) {
    detail::require(k >= 1, "k must be positive");
    const int n = scaling_order(i, k);
    const PointSet a = normalized_curve(draw_fibonacci(i, n, alpha, 1.0, parity), chord);
    const PointSet b = normalized_curve(draw_fibonacci(i, n + 6, alpha, 1.0, parity), chord);
    r.rows.push_back({k, n, hausdorff_distance(a, b)});
  }
  r.strictly_decreasing = true;
  for (std::size_t t = 1; t < r.rows.size(); ++t)
    r.strictly_decreasing = r.strictly_decreasing && r.rows[t].distance < r.rows[t - 1].distance;
  std::vector<double> x, y;
  for (const auto& row : r.rows)
    if (row.distance > 0) {
      x.push_back(row.k);
      y.push_back(std::log(row.distance));
    }
  r.decay_rate = x.size() >= 2 ? std::exp(fit_line(x, y).slope) : 0.0;
  return r;
}

struct CurveAttractorRow {
  int k = 0;
  int n = 0;
  double distance = 0.0;
  double relative = 0.0;  // distance / attractor diameter
};

/// d_H(normalized F_{n(k)}, attractor sample) for each k.
inline std::vector<CurveAttractorRow> curve_attractor_distances(const Ifs& f, std::span<const int> ks, int depth) {
  const PointSet a = attractor(f, depth);
  const GridIndex ga(a);
  const double diam = bounds_of(a).diameter();
  std::vector<CurveAttractorRow> rows;
  for (int k : ks) {
    const int n = scaling_order(f.i, k);
    const PointSet c = normalized_curve(draw_fibonacci(f.i, n, f.alpha, 1.0, f.turn), f.chord);
    const GridIndex gc(c);
    const double d = std::max(directed_hausdorff(a, gc), directed_hausdorff(c, ga));
    rows.push_back({k, n, d, d / diam});
  }
  return rows;
}

struct ContinuityProbe {
  double distance = 0.0;
  double diameter = 0.0;  // of the attractor at alpha
  double relative = 0.0;
};

/// d_H between the attractors at alpha and alpha + delta.
inline ContinuityProbe continuity_probe(int i, double alpha, double delta, int depth, int n_ref = 0) {
  detail::check_angle(alpha);
  detail::check_angle(alpha + delta);
  const PointSet a = attractor(derive_ifs(i, alpha, n_ref), depth);
  ContinuityProbe p;
  p.diameter = bounds_of(a).diameter();
  if (delta != 0.0) p.distance = hausdorff_distance(a, attractor(derive_ifs(i, alpha + delta, n_ref), depth));
  p.relative = p.distance / p.diameter;
  return p;
}

/// Dense samples of the segment from 0 to `chord`.
inline PointSet segment_samples(Vec2 chord, std::size_t count) {
  detail::require(count >= 2, "need at least two samples");
  PointSet s(count);
  for (std::size_t k = 0; k < count; ++k) s[k] = (static_cast<double>(k) / static_cast<double>(count - 1)) * chord;
  return s;
}

/// Hausdorff distance between the attractor sample and its chord segment
/// (segment sampled at 2^17 points, so the value is exact to ~1e-5 of the chord).
inline double distance_to_chord(const Ifs& f, int depth) {
  return hausdorff_distance(attractor(f, depth), segment_samples(f.chord, std::size_t{1} << 17));
}

}  // namespace fibfrac
