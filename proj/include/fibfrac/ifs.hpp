#pragma once

// Five-map iterated function system of the curve family.
//
// Construction. The drawing of f_n is the concatenation of five sub-curves
// (f_{n-3}, f_{n-3}, f_{n-6}, l_{n-3}, l_{n-3}). Sub-curve k starts at the
// heading pi/2 + c_k alpha and, when its first symbol sits at an odd offset,
// with the turn parity flipped, so it is Rot(c_k alpha) M^{p_k} applied to a
// drawing of the shorter word (M mirrors across the vertical). Orders n and
// n-3 fall into two shape classes; in the limit both classes are similar
// copies of one set K with chords u0 (class of n) and u1 (class of n-3). The
// chord of the whole is the sum of the part chords, for both classes:
//
//   e(psi0) = sum_k rho^{e_k} Q_k e(psi_{class k}),   and likewise for n-3,
//
// four scalar equations in psi0, psi1 and rho, solved by Gauss-Newton. The
// maps are then phi_k = rho^{e_k} Q_k S_k + J_k, with S the class-to-class
// similarity and J_k the chord junctions. rho comes out equal to R(alpha)
// without being told.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fibfrac/error.hpp"
#include "fibfrac/geometry.hpp"
#include "fibfrac/hausdorff.hpp"
#include "fibfrac/parallel.hpp"
#include "fibfrac/turtle.hpp"
#include "fibfrac/words.hpp"

namespace fibfrac {

inline constexpr int kDefaultEvenReference = 22;
inline constexpr int kDefaultOddReference = 20;

inline int default_reference_order(int i) { return (i % 2 == 0) ? kDefaultEvenReference : kDefaultOddReference; }

struct Ifs {
  int i = 2;
  double alpha = 0.0;
  int n_ref = 0;
  TurnParity turn = TurnParity::EvenLeft;
  std::array<Similarity, 5> maps{};
  Vec2 chord{};                 // canonical chord u0; the attractor runs from 0 to u0
  double ratio = 0.0;           // rho
  double chord_angle = 0.0;     // psi0
  double class_angle = 0.0;     // psi1
  bool class_reflect = false;   // class map is a reflection (else a rotation)
  double closure_residual = 0.0;
  double landmark_residual = 0.0;  // relative to the reference curve's diameter

  bool odd() const noexcept { return i % 2 != 0; }
  std::array<Vec2, 2> seeds() const noexcept { return {Vec2{}, chord}; }
};

namespace detail {

struct JunctionData {
  std::array<std::int64_t, 5> turns{};  // heading multiple of alpha at each part start
  std::array<int, 5> offset_parity{};   // start offset mod 2
};

inline JunctionData junction_data(const Word& w, const FivePartite& fp, TurnParity parity) {
  JunctionData d;
  std::int64_t k = 0;
  std::size_t at = 0;
  for (std::size_t part = 0; part < 5; ++part) {
    const std::size_t start = fp.parts[part].begin;
    k += turn_count(w, at, start, parity);
    at = start;
    d.turns[part] = k;
    d.offset_parity[part] = static_cast<int>(start % 2);
  }
  return d;
}

inline Mat2 part_frame(const JunctionData& d, std::size_t part, double alpha) {
  const Mat2 r = Mat2::rotation(static_cast<double>(d.turns[part]) * alpha);
  return d.offset_parity[part] ? r * Mat2{-1, 0, 0, 1} : r;
}

inline constexpr bool same_class(std::size_t part) noexcept { return part == 2; }

struct ClosureProblem {
  JunctionData whole, shorter;  // orders n and n-3
  double alpha = 0.0;

  Eigen::Vector4d residual(double psi0, double psi1, double rho) const {
    Eigen::Vector4d out;
    const std::array<double, 2> psi{psi0, psi1};
    const JunctionData* data[2] = {&whole, &shorter};
    for (int c = 0; c < 2; ++c) {
      Vec2 sum{};
      for (std::size_t k = 0; k < 5; ++k) {
        const int cls = same_class(k) ? c : 1 - c;
        const double s = same_class(k) ? rho * rho : rho;
        sum += s * part_frame(*data[c], k, alpha)(unit_vector(psi[static_cast<std::size_t>(cls)]));
      }
      sum -= unit_vector(psi[static_cast<std::size_t>(c)]);
      out(2 * c) = sum.x;
      out(2 * c + 1) = sum.y;
    }
    return out;
  }
};

struct ClosureSolution {
  double psi0 = 0.0, psi1 = 0.0, rho = 0.0;
  double residual = 0.0;
  double conditioning = 0.0;  // smallest / largest singular value of the Jacobian
};

/// Gauss-Newton on the closure equations; `free` selects which of
/// (psi0, psi1, rho) are unknowns.
inline ClosureSolution solve_closure(const ClosureProblem& p, Eigen::Vector3d x, std::array<bool, 3> free) {
  auto eval = [&](const Eigen::Vector3d& v) { return p.residual(v(0), v(1), v(2)); };
  auto jacobian = [&](const Eigen::Vector3d& v) {
    Eigen::Matrix<double, 4, 3> j = Eigen::Matrix<double, 4, 3>::Zero();
    constexpr double h = 1e-7;
    for (int c = 0; c < 3; ++c) {
      if (!free[static_cast<std::size_t>(c)]) continue;
      Eigen::Vector3d a = v, b = v;
      a(c) += h;
      b(c) -= h;
      j.col(c) = (eval(a) - eval(b)) / (2 * h);
    }
    return j;
  };
  for (int it = 0; it < 100; ++it) {
    const Eigen::Matrix<double, 4, 3> j = jacobian(x);
    const Eigen::Vector3d step = j.jacobiSvd(Eigen::ComputeFullU | Eigen::ComputeFullV).solve(-eval(x));
    x += step;
    if (step.norm() < 1e-15) break;
  }
  ClosureSolution s{x(0), x(1), x(2), eval(x).cwiseAbs().maxCoeff(), 0.0};
  const Eigen::Matrix<double, 4, 3> j = jacobian(x);
  const auto sv = j.jacobiSvd().singularValues();
  s.conditioning = sv(0) > 0 ? sv(2) / sv(0) : 0.0;
  return s;
}

inline Vec2 chord_of(const Polyline& p) { return p.points.back() - p.points.front(); }

/// Landmarks of a drawn word: its first vertex and the ends of its five parts.
inline std::array<Vec2, 6> junction_points(const Polyline& p, const FivePartite& fp, std::size_t offset = 0) {
  std::array<Vec2, 6> out{};
  for (std::size_t k = 0; k < 5; ++k) out[k] = p.points[offset + fp.parts[k].begin];
  out[5] = p.points[offset + fp.parts[4].end()];
  return out;
}

/// Similarity without reflection taking p.front() to 0 and p.back() to `chord`.
inline Similarity chord_normalizer(Vec2 first, Vec2 last, Vec2 chord) {
  using C = std::complex<double>;
  const C a = C{chord.x, chord.y} / C{last.x - first.x, last.y - first.y};
  const C t = -a * C{first.x, first.y};
  return {std::abs(a), std::arg(a), false, {t.real(), t.imag()}};
}

/// Does the class map reflect? Decided by fitting the scale-normalized
/// junction landmarks of f_n onto those of f_{n-3}.
inline bool class_map_reflects(int i, int n, double alpha, TurnParity parity) {
  const Polyline a = draw_fibonacci(i, n, alpha, 1.0, parity);
  const Polyline b = draw_fibonacci(i, n - 3, alpha, 1.0, parity);
  auto landmarks = [](const Polyline& p, const FivePartite& fp) {
    auto j = junction_points(p, fp);
    const double s = 1.0 / norm(chord_of(p));
    for (auto& v : j) v = s * (v - p.points.front());
    return j;
  };
  const auto la = landmarks(a, five_partite(i, n));
  const auto lb = landmarks(b, five_partite(i, n - 3));
  try {
    return fit_similarity(la, lb).map.reflect;
  } catch (const DegenerateError&) {
    // Straight drawings carry no orientation; the choice is constant in alpha.
    if (alpha == std::numbers::pi / 4) throw;
    return class_map_reflects(i, n, std::numbers::pi / 4, parity);
  }
}

}  // namespace detail

/// Derives the IFS from the reference words f_{n_ref} and f_{n_ref - 3}.
/// n_ref must be in the scaling subsequence (4 mod 6 for even i, 2 mod 6 for
/// odd i) and at least 13.
inline Ifs derive_ifs(int i, double alpha, int n_ref = 0, TurnParity parity = TurnParity::EvenLeft) {
  detail::check_angle(alpha);
  if (n_ref == 0) n_ref = default_reference_order(i);
  detail::check_family(i, n_ref);
  detail::require(in_scaling_class(i, n_ref),
                  "reference order must be 4 (mod 6) for even i and 2 (mod 6) for odd i");
  detail::require(n_ref >= 13, "reference order must be at least 13");

  const Word w = word_concat(i, n_ref), v = word_concat(i, n_ref - 3);
  const FivePartite fw = five_partite(i, n_ref), fv = five_partite(i, n_ref - 3);
  const detail::JunctionData dw = detail::junction_data(w, fw, parity);
  const detail::JunctionData dv = detail::junction_data(v, fv, parity);

  auto solve_at = [&](double a) {
    const Polyline pw = draw(w, a, 1.0, parity), pv = draw(v, a, 1.0, parity);
    const Vec2 cw = detail::chord_of(pw), cv = detail::chord_of(pv);
    const Eigen::Vector3d x0(std::atan2(cw.y, cw.x), std::atan2(cv.y, cv.x), norm(cv) / norm(cw));
    return detail::solve_closure({dw, dv, a}, x0, {true, true, true});
  };

  detail::ClosureSolution sol = solve_at(alpha);
  if (sol.conditioning < 1e-6) {
    // The chord directions are not pinned down by closure alone here (this
    // happens at alpha = pi/2); they are linear in alpha, so take them from
    // three nearby well-posed solves and re-solve for rho.
    constexpr double h = 0.01;
    const double dir = alpha + 3 * h <= std::numbers::pi / 2 ? 1.0 : -1.0;
    const auto s1 = solve_at(alpha + dir * h), s2 = solve_at(alpha + 2 * dir * h), s3 = solve_at(alpha + 3 * dir * h);
    const double psi0 = 3 * s1.psi0 - 3 * s2.psi0 + s3.psi0;
    const double psi1 = 3 * s1.psi1 - 3 * s2.psi1 + s3.psi1;
    const double cond = sol.conditioning;
    sol = detail::solve_closure({dw, dv, alpha}, Eigen::Vector3d(psi0, psi1, sol.rho), {false, false, true});
    sol.conditioning = cond;
  }
  if (!(sol.rho > 0 && sol.rho < 1) || sol.residual > 1e-9)
    throw SelfSimilarityError("chord closure has no contracting solution (residual " +
                              std::to_string(sol.residual) + ")");

  Ifs f;
  f.i = i;
  f.alpha = alpha;
  f.n_ref = n_ref;
  f.turn = parity;
  f.ratio = sol.rho;
  f.chord_angle = std::remainder(sol.psi0, 2 * std::numbers::pi);
  f.class_angle = std::remainder(sol.psi1, 2 * std::numbers::pi);
  f.chord = std::numbers::sqrt2 * unit_vector(f.chord_angle);
  f.closure_residual = sol.residual;
  f.class_reflect = detail::class_map_reflects(i, n_ref, alpha, parity);
  const Mat2 s = f.class_reflect ? Mat2::reflection(0.5 * (f.chord_angle + f.class_angle))
                                 : Mat2::rotation(f.class_angle - f.chord_angle);
  Vec2 junction{};
  for (std::size_t k = 0; k < 5; ++k) {
    const bool same = detail::same_class(k);
    const Mat2 a = (same ? f.ratio * f.ratio : f.ratio) * (detail::part_frame(dw, k, alpha) * (same ? Mat2{} : s));
    f.maps[k] = Similarity::from_linear(a, junction);
    junction += a(f.chord);
  }

  // Self-similarity check against the drawn reference curve: the maps must
  // carry the whole curve's junction landmarks onto those of each part.
  const Polyline pw = draw(w, alpha, 1.0, parity);
  const Similarity to_frame = detail::chord_normalizer(pw.points.front(), pw.points.back(), f.chord);
  Polyline canon = pw;
  for (auto& p : canon.points) p = to_frame(p);
  const double diam = bounds_of(canon.points).diameter();
  const auto whole = detail::junction_points(canon, fw);
  double worst = 0;
  for (std::size_t k = 0; k < 5; ++k) {
    const auto sub = detail::junction_points(canon, five_partite(i, fw.part_order(k)), fw.parts[k].begin);
    for (std::size_t j = 0; j < 6; ++j) worst = std::max(worst, norm(f.maps[k](whole[j]) - sub[j]));
  }
  f.landmark_residual = worst / diam;
  if (f.landmark_residual > 0.05)
    throw SelfSimilarityError("reference curve is not self-similar under the derived maps (relative residual " +
                              std::to_string(f.landmark_residual) + ")");
  return f;
}

// --- attractor ---------------------------------------------------------------

inline constexpr int kMaxAttractorDepth = 11;

inline std::size_t attractor_size(int depth) {
  std::size_t n = 2;
  for (int d = 0; d < depth; ++d) n *= 5;
  return n;
}

/// V_0 = seeds, V_{d+1} = phi_1(V_d) ++ ... ++ phi_5(V_d): the points come out
/// in depth-first address order for any worker count.
inline PointSet attractor_from(std::span<const Similarity> maps, std::span<const Vec2> seeds, int depth) {
  detail::require(depth >= 0 && depth <= kMaxAttractorDepth, "attractor depth must lie in [0, 11]");
  detail::require(!maps.empty() && !seeds.empty(), "attractor needs maps and seeds");
  std::vector<AffineMap> affine;
  for (const auto& m : maps) affine.emplace_back(m);
  PointSet cur(seeds.begin(), seeds.end()), next;
  for (int d = 0; d < depth; ++d) {
    const std::size_t n = cur.size();
    next.resize(n * affine.size());
    parallel_chunks(next.size(), [&](std::size_t b, std::size_t e, unsigned) {
      for (std::size_t k = b; k < e; ++k) next[k] = affine[k / n](cur[k % n]);
    });
    cur.swap(next);
  }
  return cur;
}

inline PointSet attractor(const Ifs& f, int depth) {
  const auto s = f.seeds();
  return attractor_from(f.maps, s, depth);
}

/// Deepest sample whose size (2 * 5^d) stays within `budget`.
inline PointSet attractor_budget(const Ifs& f, std::size_t budget) {
  if (budget < 2) throw DomainError("attractor budget must be at least 2");
  int depth = 0;
  while (depth < kMaxAttractorDepth && attractor_size(depth + 1) <= budget) ++depth;
  return attractor(f, depth);
}

// --- open set condition --------------------------------------------------------

struct Trapezoid {
  Vec2 base0{}, base1{};  // chord endpoints
  double height = 0.0;
  double leg0 = 0.0;      // interior angle at base0
  double leg1 = 0.0;      // interior angle at base1
  int side = 1;           // +1: on the left of base0 -> base1

  Polygon polygon() const {
    const Vec2 d = base1 - base0;
    const double len = norm(d);
    const Vec2 ex = (1.0 / len) * d, ey = static_cast<double>(side) * perp(ex);
    auto at = [&](double a, double b) { return base0 + a * ex + b * ey; };
    return make_ccw({at(0, 0), at(len, 0), at(len - height * std::cos(leg1) / std::sin(leg1), height),
                     at(height * std::cos(leg0) / std::sin(leg0), height)});
  }
};

namespace detail {

/// Smallest trapezoid on the chord containing `pts` (base on the chord, legs
/// through the chord endpoints, top parallel to the chord).
inline Trapezoid fit_trapezoid(std::span<const Vec2> pts, Vec2 chord, int side_hint = 0) {
  Trapezoid t;
  t.base1 = chord;
  const double len = norm(chord);
  const Vec2 ex = (1.0 / len) * chord;
  double up = 0, down = 0;
  for (Vec2 p : pts) {
    const double b = cross(ex, p);
    up = std::max(up, b);
    down = std::max(down, -b);
  }
  t.side = side_hint ? side_hint : (up >= down ? 1 : -1);
  const Vec2 ey = static_cast<double>(t.side) * perp(ex);
  for (Vec2 p : pts) {
    const double a = dot(p, ex), b = dot(p, ey);
    t.height = std::max(t.height, b);
    if (b > 1e-12 * len) {
      t.leg0 = std::max(t.leg0, std::atan2(b, a));
      t.leg1 = std::max(t.leg1, std::atan2(b, len - a));
    }
  }
  return t;
}

}  // namespace detail

struct OscReport {
  bool contained = false;
  bool pairwise_disjoint = false;
  bool degenerate = false;
  double margin = 0.0;                 // smallest gap between non-adjacent images
  double containment_clearance = 0.0;  // smallest clearance of an image inside V
  double adjacent_separation = 0.0;    // largest overlap depth of touching images (<= 0)
  int overlapping_first = -1;
  int overlapping_second = -1;
  Trapezoid open_set;
  std::array<Polygon, 5> images{};
};

/// Open set condition with V the trapezoid on the chord, grown from the
/// depth-8 sample until it contains its own images' vertices.
inline OscReport verify_osc(const Ifs& f) {
  OscReport r;
  PointSet sample = attractor(f, 8);
  const double len = norm(f.chord);
  Trapezoid v = detail::fit_trapezoid(sample, f.chord);
  if (v.height <= 1e-12 * len) {
    r.degenerate = true;
    r.open_set = v;
    return r;
  }
  const std::size_t base = sample.size();
  for (int it = 0; it < 200; ++it) {
    sample.resize(base);
    const Polygon poly = v.polygon();
    for (const auto& m : f.maps)
      for (Vec2 q : poly) sample.push_back(m(q));
    const Trapezoid next = detail::fit_trapezoid(sample, f.chord, v.side);
    const double change = std::max({std::abs(next.height - v.height), std::abs(next.leg0 - v.leg0),
                                    std::abs(next.leg1 - v.leg1)});
    v = next;
    if (change < 1e-15) break;
  }
  r.open_set = v;
  const Polygon outer = v.polygon();
  double diam = 0;
  for (Vec2 a : outer)
    for (Vec2 b : outer) diam = std::max(diam, norm(a - b));
  const double tol = 1e-9 * diam;

  r.containment_clearance = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < 5; ++k) {
    Polygon img;
    for (Vec2 q : outer) img.push_back(f.maps[k](q));
    r.images[k] = make_ccw(std::move(img));
    r.containment_clearance = std::min(r.containment_clearance, containment_clearance(outer, r.images[k]));
  }
  r.contained = r.containment_clearance >= -tol;

  r.pairwise_disjoint = true;
  r.margin = std::numeric_limits<double>::infinity();
  r.adjacent_separation = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = a + 1; b < 5; ++b) {
      const double sep = separation(r.images[a], r.images[b]);
      if (b == a + 1)
        r.adjacent_separation = std::max(r.adjacent_separation, std::min(sep, 0.0));
      else
        r.margin = std::min(r.margin, sep);
      if (sep < -tol && r.pairwise_disjoint) {
        r.pairwise_disjoint = false;
        r.overlapping_first = static_cast<int>(a);
        r.overlapping_second = static_cast<int>(b);
      }
    }
  }
  return r;
}

// --- invariance ----------------------------------------------------------------

/// d_H(phi_1(A) u ... u phi_5(A), A), without materializing the images:
/// dist(a, phi_k(A)) = scale_k * dist(phi_k^{-1}(a), A).
inline double invariance_residual_maps(std::span<const Similarity> maps, std::span<const Vec2> a) {
  detail::require(a.size() >= 1, "invariance residual needs points");
  const GridIndex grid(a);
  std::vector<AffineMap> fwd, inv;
  std::vector<double> scale_sq;
  for (const auto& m : maps) {
    fwd.emplace_back(m);
    inv.emplace_back(m.inverse());
    scale_sq.push_back(m.scale * m.scale);
  }
  const std::size_t n = a.size(), count = maps.size();
  const double image_to_set = directed_hausdorff_by(
      n * count, [&](std::size_t k, double limit) {
        return grid.nearest_sq(fwd[k / n](a[k % n]), limit, false, std::isfinite(limit));
      });

  const Bounds box = grid.bounds();
  const double set_to_image = directed_hausdorff_by(n, [&](std::size_t k, double limit) {
    std::array<std::pair<double, std::size_t>, 8> order{};
    std::array<Vec2, 8> q{};
    const std::size_t m = std::min<std::size_t>(count, order.size());
    for (std::size_t c = 0; c < m; ++c) {
      q[c] = inv[c](a[k]);
      const double gx = std::max({0.0, box.lo.x - q[c].x, q[c].x - box.hi.x});
      const double gy = std::max({0.0, box.lo.y - q[c].y, q[c].y - box.hi.y});
      order[c] = {scale_sq[c] * (gx * gx + gy * gy), c};
    }
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
    const bool any = std::isfinite(limit);
    double best = limit;
    for (std::size_t t = 0; t < m; ++t) {
      const std::size_t c = order[t].second;
      if (order[t].first >= best) break;
      best = std::min(best, scale_sq[c] * grid.nearest_sq(q[c], best / scale_sq[c], false, any));
      if (any && best < limit) break;
    }
    return best;
  });
  return std::max(image_to_set, set_to_image);
}

inline double invariance_residual(const Ifs& f, std::span<const Vec2> a) {
  return invariance_residual_maps(f.maps, a);
}

}  // namespace fibfrac
