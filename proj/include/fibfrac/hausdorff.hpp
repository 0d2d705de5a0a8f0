#pragma once

// Exact Hausdorff distance between finite planar point sets.
//
// Nearest-neighbour queries run against a dense bucket grid (cells of side
// eps, bucket coordinates floor(x / eps)). Directed distances use the
// early-break scheme: a query point that has a neighbour within the running
// maximum cannot raise it, so only a bounded search is needed for it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "fibfrac/error.hpp"
#include "fibfrac/geometry.hpp"
#include "fibfrac/parallel.hpp"

namespace fibfrac {

using PointSet = std::vector<Vec2>;

struct Bounds {
  Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

  void add(Vec2 p) noexcept {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  double diameter() const noexcept { return norm(hi - lo); }
};

inline Bounds bounds_of(std::span<const Vec2> pts) {
  Bounds b;
  for (Vec2 p : pts) b.add(p);
  return b;
}

class GridIndex {
 public:
  static constexpr std::size_t kMaxCells = std::size_t{1} << 24;

  /// cell <= 0 picks a size giving a few points per occupied cell.
  explicit GridIndex(std::span<const Vec2> pts, double cell = 0.0) {
    if (pts.empty()) throw DomainError("grid index over an empty point set");
    for (Vec2 p : pts)
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("non-finite point");
    bounds_ = bounds_of(pts);
    if (cell > 0) {
      set_cell(cell);
      if (cell_count() > kMaxCells) throw DomainError("grid cell too small for the point extent");
    } else {
      choose_cell(pts);
    }
    build(pts);
  }

  double cell() const noexcept { return cell_; }
  const Bounds& bounds() const noexcept { return bounds_; }
  std::size_t size() const noexcept { return pts_.size(); }
  std::int64_t origin_x() const noexcept { return ox_; }
  std::int64_t origin_y() const noexcept { return oy_; }
  std::int64_t cells_x() const noexcept { return nx_; }
  std::int64_t cells_y() const noexcept { return ny_; }

  /// Points of bucket (floor(x/eps), floor(y/eps)) = (cx, cy).
  std::span<const Vec2> bucket(std::int64_t cx, std::int64_t cy) const noexcept {
    const std::int64_t i = cx - ox_, j = cy - oy_;
    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return {};
    const std::size_t c = static_cast<std::size_t>(j * nx_ + i);
    return {pts_.data() + start_[c], pts_.data() + start_[c + 1]};
  }

  /// Squared distance from q to the nearest indexed point when that is below
  /// `limit_sq`; otherwise some value >= limit_sq.
  /// With `skip_equal`, points coinciding with q are ignored. With
  /// `any_below`, the search stops at the first point under the limit (the
  /// result is then only known to be < limit_sq).
  ///
  /// Best-first descent through an occupancy pyramid over the buckets (each
  /// level halves the resolution), so the cost does not grow with the number
  /// of empty cells between q and the set.
  double nearest_sq(Vec2 q, double limit_sq = std::numeric_limits<double>::infinity(),
                    bool skip_equal = false, bool any_below = false) const {
    const double gx = axis_gap(q.x, bounds_.lo.x, bounds_.hi.x);
    const double gy = axis_gap(q.y, bounds_.lo.y, bounds_.hi.y);
    if (gx * gx + gy * gy >= limit_sq) return limit_sq;

    double best = limit_sq;
    // The home block usually settles the query; it also tightens the pruning.
    const std::int64_t cx = home_cell(q.x, ox_, nx_), cy = home_cell(q.y, oy_, ny_);
    for (std::int64_t j = std::max<std::int64_t>(0, cy - 1); j <= std::min(ny_ - 1, cy + 1); ++j)
      for (std::int64_t i = std::max<std::int64_t>(0, cx - 1); i <= std::min(nx_ - 1, cx + 1); ++i)
        scan_cell(q, i, j, best, skip_equal);
    if (any_below && best < limit_sq) return best;
    if (best < limit_sq && best <= block_reach_sq(q, cx, cy)) return best;

    thread_local std::vector<Node> heap;
    heap.clear();
    const auto later = [](const Node& u, const Node& v) { return u.lb_sq > v.lb_sq; };
    const auto push = [&](int level, std::int64_t i, std::int64_t j) {
      const Level& L = levels_[static_cast<std::size_t>(level)];
      if (!L.occupied[static_cast<std::size_t>(j * L.nx + i)]) return;
      const double d = node_gap_sq(q, level, i, j);
      if (d >= best) return;
      heap.push_back({d, level, i, j});
      std::push_heap(heap.begin(), heap.end(), later);
    };
    const int top = static_cast<int>(levels_.size()) - 1;
    for (std::int64_t j = 0; j < levels_.back().ny; ++j)
      for (std::int64_t i = 0; i < levels_.back().nx; ++i) push(top, i, j);
    while (!heap.empty()) {
      std::pop_heap(heap.begin(), heap.end(), later);
      const Node n = heap.back();
      heap.pop_back();
      if (n.lb_sq >= best) break;
      if (n.level == 0) {
        scan_cell(q, n.i, n.j, best, skip_equal);
        if (any_below && best < limit_sq) break;
        continue;
      }
      const Level& C = levels_[static_cast<std::size_t>(n.level - 1)];
      for (std::int64_t j = 2 * n.j; j <= std::min(2 * n.j + 1, C.ny - 1); ++j)
        for (std::int64_t i = 2 * n.i; i <= std::min(2 * n.i + 1, C.nx - 1); ++i) push(n.level - 1, i, j);
    }
    return best;
  }

 private:
  struct Node {
    double lb_sq;
    int level;
    std::int64_t i, j;
  };
  struct Level {
    std::int64_t nx, ny;
    std::vector<std::uint8_t> occupied;
  };

  static double axis_gap(double v, double lo, double hi) noexcept {
    return v < lo ? lo - v : (v > hi ? v - hi : 0.0);
  }

  std::int64_t home_cell(double v, std::int64_t origin, std::int64_t count) const noexcept {
    const double f = std::floor(v / cell_) - static_cast<double>(origin);
    if (!(f >= 0)) return 0;
    return f >= static_cast<double>(count - 1) ? count - 1 : static_cast<std::int64_t>(f);
  }

  // Squared distance from q to the outside of the 3x3 block around (cx, cy);
  // sides on the grid edge have nothing beyond them.
  double block_reach_sq(Vec2 q, std::int64_t cx, std::int64_t cy) const noexcept {
    const double slack = 1e-9 * cell_;
    double reach = std::numeric_limits<double>::infinity();
    const auto side = [&](double d) { reach = std::min(reach, std::max(0.0, d - slack)); };
    if (cx - 1 > 0) side(q.x - static_cast<double>(ox_ + cx - 1) * cell_);
    if (cx + 2 < nx_) side(static_cast<double>(ox_ + cx + 2) * cell_ - q.x);
    if (cy - 1 > 0) side(q.y - static_cast<double>(oy_ + cy - 1) * cell_);
    if (cy + 2 < ny_) side(static_cast<double>(oy_ + cy + 2) * cell_ - q.y);
    return reach * reach;
  }

  // Gap along one axis from v to the slab of fine cells [i0, i1); slabs are
  // widened slightly and edge slabs reach the bounds so rounding in the
  // bucket assignment can never hide a point.
  double slab_gap(double v, std::int64_t i0, std::int64_t i1, std::int64_t origin, std::int64_t count, double lo_b,
                  double hi_b) const noexcept {
    const double slack = 1e-9 * cell_;
    const double lo = i0 == 0 ? lo_b : std::max(lo_b, static_cast<double>(origin + i0) * cell_ - slack);
    const double hi = i1 >= count ? hi_b : std::min(hi_b, static_cast<double>(origin + i1) * cell_ + slack);
    return axis_gap(v, lo, hi);
  }

  double node_gap_sq(Vec2 q, int level, std::int64_t i, std::int64_t j) const noexcept {
    const double dx = slab_gap(q.x, i << level, (i + 1) << level, ox_, nx_, bounds_.lo.x, bounds_.hi.x);
    const double dy = slab_gap(q.y, j << level, (j + 1) << level, oy_, ny_, bounds_.lo.y, bounds_.hi.y);
    return dx * dx + dy * dy;
  }

  void scan_cell(Vec2 q, std::int64_t i, std::int64_t j, double& best, bool skip_equal) const noexcept {
    const std::size_t c = static_cast<std::size_t>(j * nx_ + i);
    for (std::uint32_t k = start_[c]; k < start_[c + 1]; ++k) {
      const double dx = pts_[k].x - q.x, dy = pts_[k].y - q.y;
      const double d = dx * dx + dy * dy;
      if (d < best && !(skip_equal && d == 0)) best = d;
    }
  }

  std::size_t cell_count() const noexcept { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }

  void set_cell(double cell) {
    cell_ = cell;
    const double fx0 = std::floor(bounds_.lo.x / cell), fy0 = std::floor(bounds_.lo.y / cell);
    const double fx1 = std::floor(bounds_.hi.x / cell), fy1 = std::floor(bounds_.hi.y / cell);
    if (fx1 - fx0 + 1 > 1e12 || fy1 - fy0 + 1 > 1e12) {
      nx_ = ny_ = std::int64_t{1} << 40;
      return;
    }
    ox_ = static_cast<std::int64_t>(fx0);
    oy_ = static_cast<std::int64_t>(fy0);
    nx_ = static_cast<std::int64_t>(fx1 - fx0) + 1;
    ny_ = static_cast<std::int64_t>(fy1 - fy0) + 1;
  }

  void choose_cell(std::span<const Vec2> pts) {
    const double extent = std::max(bounds_.hi.x - bounds_.lo.x, bounds_.hi.y - bounds_.lo.y);
    double cell = extent > 0 ? extent / std::sqrt(static_cast<double>(pts.size())) : 1.0;
    if (cell <= 0 || !std::isfinite(cell)) cell = 1.0;
    set_cell(cell);
    while (cell_count() > kMaxCells) set_cell(cell_ * 2);
    std::vector<std::uint32_t> counts;
    for (int round = 0; round < 16 && extent > 0; ++round) {
      counts.assign(cell_count(), 0);
      std::size_t occupied = 0;
      for (Vec2 p : pts) {
        auto& c = counts[cell_of(p)];
        occupied += (c++ == 0);
      }
      const double load = static_cast<double>(pts.size()) / static_cast<double>(occupied);
      if (load <= 4.0) break;
      const double prev = cell_;
      set_cell(cell_ / 2);
      if (cell_count() > kMaxCells) {
        set_cell(prev);
        break;
      }
    }
  }

  std::size_t cell_of(Vec2 p) const noexcept {
    const std::int64_t i = static_cast<std::int64_t>(std::floor(p.x / cell_)) - ox_;
    const std::int64_t j = static_cast<std::int64_t>(std::floor(p.y / cell_)) - oy_;
    return static_cast<std::size_t>(std::clamp<std::int64_t>(j, 0, ny_ - 1) * nx_ +
                                    std::clamp<std::int64_t>(i, 0, nx_ - 1));
  }

  void build(std::span<const Vec2> pts) {
    if (pts.size() >= std::numeric_limits<std::uint32_t>::max()) throw DomainError("too many points");
    start_.assign(cell_count() + 1, 0);
    for (Vec2 p : pts) ++start_[cell_of(p) + 1];
    for (std::size_t c = 0; c < cell_count(); ++c) start_[c + 1] += start_[c];
    std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
    pts_.resize(pts.size());
    for (Vec2 p : pts) pts_[fill[cell_of(p)]++] = p;

    levels_.clear();
    Level base{nx_, ny_, std::vector<std::uint8_t>(cell_count())};
    for (std::size_t c = 0; c < cell_count(); ++c) base.occupied[c] = start_[c + 1] > start_[c];
    levels_.push_back(std::move(base));
    while (levels_.back().nx * levels_.back().ny > 4) {
      const Level& f = levels_.back();
      Level up{(f.nx + 1) / 2, (f.ny + 1) / 2, {}};
      up.occupied.assign(static_cast<std::size_t>(up.nx * up.ny), 0);
      for (std::int64_t j = 0; j < f.ny; ++j)
        for (std::int64_t i = 0; i < f.nx; ++i)
          if (f.occupied[static_cast<std::size_t>(j * f.nx + i)])
            up.occupied[static_cast<std::size_t>((j / 2) * up.nx + i / 2)] = 1;
      levels_.push_back(std::move(up));
    }
  }

  Bounds bounds_;
  double cell_ = 1.0;
  std::int64_t ox_ = 0, oy_ = 0, nx_ = 1, ny_ = 1;
  std::vector<std::uint32_t> start_;
  std::vector<Vec2> pts_;
  std::vector<Level> levels_;
};

/// Directed distance over `count` query points. `query(k, limit_sq)` returns
/// the squared distance of query k to the target set when limit_sq is
/// infinite; for a finite limit it only has to land on the correct side of
/// it. Returns the largest distance.
template <class Query>
double directed_hausdorff_by(std::size_t count, Query&& query) {
  if (count == 0) throw DomainError("directed Hausdorff distance of an empty set");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Warm-up on a sparse stride so the early break bites immediately.
  double seed = 0.0;
  const std::size_t stride = std::max<std::size_t>(1, count / 1024);
  for (std::size_t k = 0; k < count; k += stride) seed = std::max(seed, query(k, kInf));
  const double worst = parallel_max(
      count,
      [&](std::size_t k) {
        const double d = query(k, seed);
        return d < seed ? 0.0 : query(k, kInf);
      },
      seed);
  return std::sqrt(worst);
}

/// max_{a in A} min_{b in B} |a - b| with B indexed by `grid`.
inline double directed_hausdorff(std::span<const Vec2> a, const GridIndex& grid) {
  return directed_hausdorff_by(a.size(), [&](std::size_t k, double limit) {
    return grid.nearest_sq(a[k], limit, false, std::isfinite(limit));
  });
}

inline double hausdorff_distance(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (a.empty() || b.empty()) throw DomainError("Hausdorff distance needs non-empty sets");
  const GridIndex ga(a), gb(b);
  return std::max(directed_hausdorff(a, gb), directed_hausdorff(b, ga));
}

/// Sampling resolution: the largest distance from a point to its nearest
/// distinct neighbour (0 when all points coincide).
inline double sample_spacing(std::span<const Vec2> pts) {
  if (pts.size() < 2) return 0.0;
  const GridIndex grid(pts);
  const double worst = parallel_max(
      pts.size(),
      [&](std::size_t k) {
        const double d = grid.nearest_sq(pts[k], std::numeric_limits<double>::infinity(), true);
        return std::isfinite(d) ? d : 0.0;
      },
      0.0);
  return std::sqrt(worst);
}

/// O(|A||B|) reference implementation.
inline double hausdorff_distance_brute(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (a.empty() || b.empty()) throw DomainError("Hausdorff distance needs non-empty sets");
  auto directed = [](std::span<const Vec2> p, std::span<const Vec2> q) {
    double worst = 0.0;
    for (Vec2 x : p) {
      double best = std::numeric_limits<double>::infinity();
      for (Vec2 y : q) {
        const double dx = y.x - x.x, dy = y.y - x.y;
        best = std::min(best, dx * dx + dy * dy);
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::sqrt(std::max(directed(a, b), directed(b, a)));
}

}  // namespace fibfrac
