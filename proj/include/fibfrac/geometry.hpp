#pragma once

// Planar primitives: points, similarities, least-squares similarity fitting,
// oriented boxes and convex polygons with separating-axis tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "fibfrac/error.hpp"

namespace fibfrac {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) noexcept { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) noexcept { x -= o.x; y -= o.y; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) noexcept { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) noexcept = default;
};

constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }
constexpr double norm_sq(Vec2 a) noexcept { return a.x * a.x + a.y * a.y; }
inline Vec2 unit_vector(double angle) noexcept { return {std::cos(angle), std::sin(angle)}; }
constexpr Vec2 perp(Vec2 a) noexcept { return {-a.y, a.x}; }

/// 2x2 linear map, row-major.
struct Mat2 {
  double a = 1, b = 0, c = 0, d = 1;
  constexpr Vec2 operator()(Vec2 p) const noexcept { return {a * p.x + b * p.y, c * p.x + d * p.y}; }
  friend constexpr Mat2 operator*(const Mat2& m, const Mat2& n) noexcept {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
  }
  friend constexpr Mat2 operator*(double s, const Mat2& m) noexcept { return {s * m.a, s * m.b, s * m.c, s * m.d}; }
  constexpr double det() const noexcept { return a * d - b * c; }

  static Mat2 rotation(double t) noexcept {
    const double cs = std::cos(t), sn = std::sin(t);
    return {cs, -sn, sn, cs};
  }
  /// Reflection across the line through the origin at angle t.
  static Mat2 reflection(double t) noexcept {
    const double cs = std::cos(2 * t), sn = std::sin(2 * t);
    return {cs, sn, sn, -cs};
  }
};

/// p -> scale * Rot(rotation) * (reflect ? conj(p) : p) + translation.
struct Similarity {
  double scale = 1.0;
  double rotation = 0.0;
  bool reflect = false;
  Vec2 translation{};

  Mat2 linear() const noexcept {
    const double cs = scale * std::cos(rotation), sn = scale * std::sin(rotation);
    return reflect ? Mat2{cs, sn, sn, -cs} : Mat2{cs, -sn, sn, cs};
  }

  Vec2 operator()(Vec2 p) const noexcept { return linear()(p) + translation; }

  /// Builds the similarity with the given linear part; the part must be a
  /// nonzero multiple of an orthogonal matrix.
  static Similarity from_linear(const Mat2& m, Vec2 t) noexcept {
    Similarity s;
    s.reflect = m.det() < 0;
    s.scale = std::sqrt(std::abs(m.det()));
    s.rotation = std::atan2(m.c, m.a);
    s.translation = t;
    return s;
  }

  Similarity inverse() const noexcept {
    const Mat2 l = linear();
    const double dt = l.det();
    const Mat2 inv{l.d / dt, -l.b / dt, -l.c / dt, l.a / dt};
    return from_linear(inv, Vec2{} - inv(translation));
  }

  /// (*this)(other(p)).
  Similarity compose(const Similarity& other) const noexcept {
    return from_linear(linear() * other.linear(), (*this)(other.translation));
  }
};

/// Applies a similarity through a cached linear part; used in hot loops.
struct AffineMap {
  Mat2 m;
  Vec2 t;
  explicit AffineMap(const Similarity& s) noexcept : m(s.linear()), t(s.translation) {}
  Vec2 operator()(Vec2 p) const noexcept { return m(p) + t; }
};

struct SimilarityFit {
  Similarity map;
  double residual = 0.0;  // RMS landmark error after the fit
};

/// Least-squares similarity carrying `src` onto `dst`, trying both
/// orientations and keeping the smaller residual.
inline SimilarityFit fit_similarity(std::span<const Vec2> src, std::span<const Vec2> dst) {
  if (src.size() != dst.size()) throw DomainError("landmark sets differ in size");
  if (src.size() < 3) throw DegenerateError("need at least three landmarks");
  using C = std::complex<double>;
  const double n = static_cast<double>(src.size());
  C sc{}, dc{};
  for (std::size_t k = 0; k < src.size(); ++k) {
    sc += C{src[k].x, src[k].y};
    dc += C{dst[k].x, dst[k].y};
  }
  sc /= n;
  dc /= n;
  double sxx = 0, syy = 0, sxy = 0, spread = 0;
  C direct{}, mirrored{};
  for (std::size_t k = 0; k < src.size(); ++k) {
    const C z = C{src[k].x, src[k].y} - sc;
    const C w = C{dst[k].x, dst[k].y} - dc;
    sxx += z.real() * z.real();
    syy += z.imag() * z.imag();
    sxy += z.real() * z.imag();
    spread += std::norm(z);
    direct += w * std::conj(z);
    mirrored += w * z;
  }
  // smallest eigenvalue of the landmark covariance
  const double tr = sxx + syy, det = sxx * syy - sxy * sxy;
  const double lmin = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4 * det)));
  if (spread == 0.0 || lmin <= 1e-12 * tr) throw DegenerateError("landmarks are collinear");

  auto make = [&](bool reflect) {
    const C a = (reflect ? mirrored : direct) / spread;
    SimilarityFit f;
    f.map.scale = std::abs(a);
    f.map.rotation = std::arg(a);
    f.map.reflect = reflect;
    const C zc = reflect ? std::conj(sc) : sc;
    const C t = dc - a * zc;
    f.map.translation = {t.real(), t.imag()};
    double ss = 0;
    for (std::size_t k = 0; k < src.size(); ++k) ss += norm_sq(f.map(src[k]) - dst[k]);
    f.residual = std::sqrt(ss / n);
    return f;
  };
  SimilarityFit plain = make(false);
  SimilarityFit flipped = make(true);
  return flipped.residual < plain.residual ? flipped : plain;
}

// --- boxes and convex polygons -------------------------------------------

/// Rectangle with one side parallel to `axis`.
struct OrientedBox {
  Vec2 center{};
  Vec2 axis{1, 0};        // unit
  Vec2 half_extents{};    // along axis, along perp(axis)

  std::array<Vec2, 4> corners() const noexcept {
    const Vec2 u = half_extents.x * axis, v = half_extents.y * perp(axis);
    return {center - u - v, center + u - v, center + u + v, center - u + v};
  }
  double diagonal() const noexcept { return 2 * norm(half_extents); }
};

/// Smallest box with the given axis containing all points.
inline OrientedBox bounding_box(std::span<const Vec2> pts, Vec2 axis) {
  if (pts.empty()) throw DomainError("bounding box of an empty set");
  const Vec2 n = perp(axis);
  double lo_u = std::numeric_limits<double>::infinity(), hi_u = -lo_u, lo_v = lo_u, hi_v = -lo_u;
  for (Vec2 p : pts) {
    const double u = dot(p, axis), v = dot(p, n);
    lo_u = std::min(lo_u, u);
    hi_u = std::max(hi_u, u);
    lo_v = std::min(lo_v, v);
    hi_v = std::max(hi_v, v);
  }
  const double cu = 0.5 * (lo_u + hi_u), cv = 0.5 * (lo_v + hi_v);
  return {cu * axis + cv * n, axis, {0.5 * (hi_u - lo_u), 0.5 * (hi_v - lo_v)}};
}

using Polygon = std::vector<Vec2>;  // convex, counter-clockwise

inline double signed_area(const Polygon& p) {
  double a = 0;
  for (std::size_t k = 0; k < p.size(); ++k) a += cross(p[k], p[(k + 1) % p.size()]);
  return 0.5 * a;
}

inline Polygon make_ccw(Polygon p) {
  if (signed_area(p) < 0) std::reverse(p.begin(), p.end());
  return p;
}

namespace detail {

inline void project(const Polygon& p, Vec2 axis, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (Vec2 v : p) {
    const double s = dot(v, axis);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
}

}  // namespace detail

/// Largest gap between the projections of two convex polygons over the edge
/// normals of both. Positive: separated; zero: touching; negative: the
/// interiors overlap by at least that depth on every axis.
inline double separation(const Polygon& a, const Polygon& b) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Polygon* poly : {&a, &b}) {
    const Polygon& p = *poly;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const Vec2 e = p[(k + 1) % p.size()] - p[k];
      const double len = norm(e);
      if (len == 0) continue;
      const Vec2 axis = (1.0 / len) * perp(e);
      double alo, ahi, blo, bhi;
      detail::project(a, axis, alo, ahi);
      detail::project(b, axis, blo, bhi);
      best = std::max(best, std::max(blo - ahi, alo - bhi));
    }
  }
  return best;
}

/// Smallest signed distance of `inner`'s vertices to the edges of `outer`
/// (positive inside). Both polygons counter-clockwise.
inline double containment_clearance(const Polygon& outer, const Polygon& inner) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < outer.size(); ++k) {
    const Vec2 e = outer[(k + 1) % outer.size()] - outer[k];
    const double len = norm(e);
    if (len == 0) continue;
    for (Vec2 v : inner) worst = std::min(worst, cross(e, v - outer[k]) / len);
  }
  return worst;
}

inline Polygon to_polygon(const OrientedBox& b) {
  const auto c = b.corners();
  return make_ccw(Polygon(c.begin(), c.end()));
}

}  // namespace fibfrac
