#pragma once

// Turtle interpretation of i-Fibonacci words.
//
// For each symbol a_j (j 1-based) draw one segment in the current heading;
// then, if a_j = 0, turn by +alpha when j is even and by -alpha when j is odd
// (TurnParity::EvenLeft). The heading is kept as pi/2 + k*alpha with an
// integer turn count k, so it never drifts.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "fibfrac/error.hpp"
#include "fibfrac/geometry.hpp"
#include "fibfrac/words.hpp"

namespace fibfrac {

inline constexpr double kInitialHeading = std::numbers::pi / 2;

enum class TurnParity : std::uint8_t {
  EvenLeft,  // literal rule: even position turns +alpha, odd turns -alpha
  OddLeft,   // mirrored convention
};

namespace detail {

inline void check_angle(double alpha) {
  require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= std::numbers::pi / 2 + 1e-15,
          "drawing angle must lie in [0, pi/2]");
}

/// Turn (in units of alpha) applied after the symbol at 1-based position j.
inline int turn_of(int symbol, std::uint64_t j, TurnParity parity) noexcept {
  if (symbol != 0) return 0;
  const int t = (j % 2 == 0) ? 1 : -1;
  return parity == TurnParity::EvenLeft ? t : -t;
}

/// Unit vector at heading pi/2 + t, written as the rotation of "up" by t so
/// that t = 0 gives exactly (0, 1).
inline Vec2 heading_vector(double t) noexcept { return {0.0 - std::sin(t), std::cos(t)}; }

/// Directions at pi/2 + k*alpha for a sliding range of k.
class HeadingTable {
 public:
  explicit HeadingTable(double alpha) : alpha_(alpha) {}

  Vec2 operator()(std::int64_t k) {
    if (dirs_.empty()) {
      lo_ = k;
      dirs_.push_back(heading_vector(static_cast<double>(k) * alpha_));
    }
    while (k < lo_) {
      --lo_;
      dirs_.insert(dirs_.begin(), heading_vector(static_cast<double>(lo_) * alpha_));
    }
    while (k >= lo_ + static_cast<std::int64_t>(dirs_.size()))
      dirs_.push_back(
          heading_vector(static_cast<double>(lo_ + static_cast<std::int64_t>(dirs_.size())) * alpha_));
    return dirs_[static_cast<std::size_t>(k - lo_)];
  }

  std::int64_t lowest() const noexcept { return lo_; }
  std::size_t span() const noexcept { return dirs_.size(); }

 private:
  double alpha_;
  std::int64_t lo_ = 0;
  std::vector<Vec2> dirs_;
};

}  // namespace detail

struct CurveMeta {
  int i = 0;
  int n = 0;
  double alpha = 0.0;
  double unit = 1.0;
  std::int64_t final_turns = 0;  // heading after the last symbol is pi/2 + final_turns*alpha
  TurnParity parity = TurnParity::EvenLeft;
};

struct Polyline {
  std::vector<Vec2> points;
  CurveMeta meta;

  double final_heading() const noexcept {
    return kInitialHeading + static_cast<double>(meta.final_turns) * meta.alpha;
  }
};

/// Sum of turns (in units of alpha) over symbols [begin, end) of w.
inline std::int64_t turn_count(const Word& w, std::size_t begin, std::size_t end,
                               TurnParity parity = TurnParity::EvenLeft) {
  std::int64_t k = 0;
  for (std::size_t p = begin; p < end; ++p) k += detail::turn_of(w[p], p + 1, parity);
  return k;
}

/// a(w): final heading of the turtle.
inline double net_angle(const Word& w, double alpha, TurnParity parity = TurnParity::EvenLeft) {
  return kInitialHeading + static_cast<double>(turn_count(w, 0, w.size(), parity)) * alpha;
}

inline Polyline draw(const Word& w, double alpha, double unit = 1.0,
                     TurnParity parity = TurnParity::EvenLeft) {
  detail::check_angle(alpha);
  detail::require(unit > 0 && std::isfinite(unit), "unit length must be positive");
  Polyline out;
  out.meta = {w.family(), w.order(), alpha, unit, 0, parity};
  out.points.reserve(w.size() + 1);

  detail::HeadingTable dirs(alpha);
  // Positions are re-anchored from exact per-direction segment counts every
  // few thousand steps; between anchors they are accumulated.
  std::vector<std::int64_t> counts;
  std::int64_t counts_lo = 0;
  auto bump = [&](std::int64_t k) {
    if (counts.empty()) counts_lo = k;
    while (k < counts_lo) {
      counts.insert(counts.begin(), 0);
      --counts_lo;
    }
    while (k >= counts_lo + static_cast<std::int64_t>(counts.size())) counts.push_back(0);
    ++counts[static_cast<std::size_t>(k - counts_lo)];
  };
  auto anchored = [&]() {
    Vec2 p{};
    for (std::size_t c = 0; c < counts.size(); ++c)
      if (counts[c]) p += static_cast<double>(counts[c]) * dirs(counts_lo + static_cast<std::int64_t>(c));
    return unit * p;
  };

  constexpr std::size_t kAnchorEvery = 1024;
  std::int64_t k = 0;
  Vec2 pos{};
  out.points.push_back(pos);
  for (std::size_t p = 0; p < w.size(); ++p) {
    bump(k);
    if ((p + 1) % kAnchorEvery == 0)
      pos = anchored();
    else
      pos += unit * dirs(k);
    out.points.push_back(pos);
    k += detail::turn_of(w[p], p + 1, parity);
  }
  out.meta.final_turns = k;
  return out;
}

inline Polyline draw_fibonacci(int i, int n, double alpha, double unit = 1.0,
                               TurnParity parity = TurnParity::EvenLeft) {
  detail::check_angle(alpha);
  return draw(word_concat(i, n), alpha, unit, parity);
}

// --- statistics ------------------------------------------------------------

struct CurveStats {
  double width = 0.0;        // |last - first|
  double height = 0.0;       // max distance of a vertex from the chord line
  double aspect = 0.0;       // width / height, +inf when height is negligible
  bool aspect_infinite = false;
  double net_angle = kInitialHeading;
};

inline CurveStats curve_stats(const Polyline& p) {
  detail::require(p.points.size() >= 2, "curve statistics need at least two points");
  const Vec2 a = p.points.front();
  const Vec2 chord = p.points.back() - a;
  CurveStats s;
  s.width = norm(chord);
  s.net_angle = p.final_heading();
  if (s.width > 0) {
    const Vec2 u = (1.0 / s.width) * chord;
    for (Vec2 q : p.points) s.height = std::max(s.height, std::abs(cross(u, q - a)));
  } else {
    for (Vec2 q : p.points) s.height = std::max(s.height, norm(q - a));
  }
  if (s.height < 1e-12 * s.width) {
    s.aspect = std::numeric_limits<double>::infinity();
    s.aspect_infinite = true;
  } else {
    s.aspect = s.width / s.height;
  }
  return s;
}

/// Lengths (in units) of maximal straight runs, in drawing order.
inline std::vector<double> straight_runs(const Polyline& p, double angle_tol = 1e-12) {
  std::vector<double> runs;
  if (p.points.size() < 2) return runs;
  double run = norm(p.points[1] - p.points[0]);
  for (std::size_t k = 2; k < p.points.size(); ++k) {
    const Vec2 d0 = p.points[k - 1] - p.points[k - 2], d1 = p.points[k] - p.points[k - 1];
    const bool straight = std::abs(cross(d0, d1)) <= angle_tol * norm(d0) * norm(d1) && dot(d0, d1) > 0;
    if (straight) {
      run += norm(d1);
    } else {
      runs.push_back(run / p.meta.unit);
      run = norm(d1);
    }
  }
  runs.push_back(run / p.meta.unit);
  return runs;
}

// --- five-partite sub-curves ------------------------------------------------

/// Box aligned with the chord of `pts` (first to last vertex).
inline OrientedBox chord_box(std::span<const Vec2> pts) {
  const Vec2 chord = pts.back() - pts.front();
  const double len = norm(chord);
  const Vec2 axis = len > 0 ? (1.0 / len) * chord : Vec2{1, 0};
  return bounding_box(pts, axis);
}

/// Frame of the sub-curve boxes. Auto: axis-aligned at alpha = pi/2, where the
/// pieces are axis-parallel but the chords of parts 4 and 5 are tilted by
/// their end defect; chord-aligned otherwise.
enum class BoxAlignment : std::uint8_t { Auto, Chord, Axes };

struct Subcurves {
  Polyline whole;
  FivePartite layout;
  std::array<Polyline, 5> parts;
  std::array<OrientedBox, 5> boxes;
};

/// Splits the drawing of f_n at the four interior five-partite junctions;
/// consecutive parts share their junction vertex.
inline Subcurves subcurves(int i, int n, double alpha, double unit = 1.0,
                           TurnParity parity = TurnParity::EvenLeft, BoxAlignment align = BoxAlignment::Auto) {
  Subcurves s;
  if (align == BoxAlignment::Auto) align = alpha == std::numbers::pi / 2 ? BoxAlignment::Axes : BoxAlignment::Chord;
  s.layout = five_partite(i, n);
  s.whole = draw_fibonacci(i, n, alpha, unit, parity);
  for (std::size_t k = 0; k < 5; ++k) {
    const SymbolRange r = s.layout.parts[k];
    auto first = s.whole.points.begin() + static_cast<std::ptrdiff_t>(r.begin);
    s.parts[k].points.assign(first, first + static_cast<std::ptrdiff_t>(r.length + 1));
    s.parts[k].meta = {i, s.layout.part_order(k), alpha, unit, 0, parity};
    s.boxes[k] = align == BoxAlignment::Axes ? bounding_box(s.parts[k].points, Vec2{1, 0})
                                             : chord_box(s.parts[k].points);
  }
  return s;
}

struct DisjointResult {
  bool disjoint = true;
  int first = -1;  // first violating pair (indices), -1 when disjoint
  int second = -1;
  double min_separation = std::numeric_limits<double>::infinity();
};

/// Pairwise interior-disjointness by the separating-axis test with tolerance
/// 1e-9 times the largest box diagonal; boundary contact is allowed.
inline DisjointResult boxes_disjoint(std::span<const OrientedBox> boxes) {
  DisjointResult r;
  double diag = 0;
  for (const auto& b : boxes) diag = std::max(diag, b.diagonal());
  const double tol = 1e-9 * diag;
  for (std::size_t a = 0; a < boxes.size(); ++a) {
    for (std::size_t b = a + 1; b < boxes.size(); ++b) {
      const double sep = separation(to_polygon(boxes[a]), to_polygon(boxes[b]));
      r.min_separation = std::min(r.min_separation, sep);
      if (sep < -tol && r.disjoint) {
        r.disjoint = false;
        r.first = static_cast<int>(a);
        r.second = static_cast<int>(b);
      }
    }
  }
  return r;
}

// --- scaling subsequence -----------------------------------------------------

/// True when f_n belongs to the subsequence whose curves share one limit shape:
/// n = 4 (mod 6) for even i, n = 2 (mod 6) for odd i.
inline bool in_scaling_class(int i, int n) noexcept {
  return (i % 2 == 0) ? (n % 6 == 4) : (n % 6 == 2);
}

/// k-th order of the scaling subsequence (k >= 0): 6k+4 or 6k+2.
inline int scaling_order(int i, int k) noexcept { return 6 * k + ((i % 2 == 0) ? 4 : 2); }

/// At alpha = pi/2: are the first and last vertices two adjacent corners of the
/// bounding box (axis-aligned for even i, rotated by pi/4 for odd i)?
inline bool endpoints_on_box(int i, int n) {
  detail::check_family(i, n);
  detail::require(in_scaling_class(i, n),
                  "endpoints_on_box needs n = 4 (mod 6) for even i, n = 2 (mod 6) for odd i");
  const Polyline p = draw_fibonacci(i, n, std::numbers::pi / 2);
  const Vec2 axis = (i % 2 == 0) ? Vec2{1, 0} : unit_vector(std::numbers::pi / 4);
  const OrientedBox box = bounding_box(p.points, axis);
  const auto corners = box.corners();
  const double tol = 1e-9 * std::max(1.0, box.diagonal());
  auto corner_of = [&](Vec2 q) {
    for (int c = 0; c < 4; ++c)
      if (norm(q - corners[c]) <= tol) return c;
    return -1;
  };
  const int a = corner_of(p.points.front()), b = corner_of(p.points.back());
  if (a < 0 || b < 0 || a == b) return false;
  return (a + 1) % 4 == b || (b + 1) % 4 == a;
}

}  // namespace fibfrac
