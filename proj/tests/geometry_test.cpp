#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <vector>

#include "fibfrac/geometry.hpp"

using namespace fibfrac;

namespace {

std::vector<Vec2> landmarks() { return {{0, 0}, {1, 0}, {1.5, 2}, {-0.5, 1}, {0.3, -0.7}}; }

}  // namespace

TEST(Similarity, DistancesScaleExactly) {
  const Similarity s{0.7, 1.1, true, {2, -3}};
  const Vec2 a{0.3, 0.9}, b{-1.2, 4.0};
  EXPECT_NEAR(norm(s(a) - s(b)), 0.7 * norm(a - b), 1e-14);
}

TEST(Similarity, ComposeAndInverse) {
  const Similarity s{0.5, 0.4, false, {1, 2}}, t{0.8, -1.3, true, {-0.5, 0.25}};
  const Similarity st = s.compose(t);
  EXPECT_NEAR(st.scale, 0.4, 1e-15);
  EXPECT_TRUE(st.reflect);
  for (Vec2 p : landmarks()) {
    EXPECT_NEAR(norm(st(p) - s(t(p))), 0.0, 1e-14);
    EXPECT_NEAR(norm(t.inverse()(t(p)) - p), 0.0, 1e-14);
  }
}

TEST(Mat2, ReflectionAcrossLine) {
  const Mat2 m = Mat2::reflection(std::numbers::pi / 4);
  const Vec2 p = m(Vec2{1, 0});
  EXPECT_NEAR(p.x, 0.0, 1e-15);
  EXPECT_NEAR(p.y, 1.0, 1e-15);
  EXPECT_NEAR(m.det(), -1.0, 1e-15);
}

TEST(FitSimilarity, Identity) {
  const auto src = landmarks();
  const SimilarityFit f = fit_similarity(src, src);
  EXPECT_NEAR(f.map.scale, 1.0, 1e-14);
  EXPECT_NEAR(f.map.rotation, 0.0, 1e-14);
  EXPECT_FALSE(f.map.reflect);
  EXPECT_LT(f.residual, 1e-14);
}

TEST(FitSimilarity, PureScale) {
  const auto src = landmarks();
  std::vector<Vec2> dst;
  for (Vec2 p : src) dst.push_back(2.0 * p);
  const SimilarityFit f = fit_similarity(src, dst);
  EXPECT_NEAR(f.map.scale, 2.0, 1e-14);
  EXPECT_NEAR(f.map.rotation, 0.0, 1e-14);
  EXPECT_LT(f.residual, 1e-14);
}

TEST(FitSimilarity, MirrorIsDetected) {
  const auto src = landmarks();
  std::vector<Vec2> dst;
  for (Vec2 p : src) dst.push_back({p.x, -p.y});
  const SimilarityFit f = fit_similarity(src, dst);
  EXPECT_TRUE(f.map.reflect);
  EXPECT_NEAR(f.map.scale, 1.0, 1e-14);
  EXPECT_LT(f.residual, 1e-14);
}

TEST(FitSimilarity, RecoversRandomSimilarities) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const Similarity s{std::abs(u(rng)) + 0.1, u(rng), trial % 2 == 1, {u(rng), u(rng)}};
    std::vector<Vec2> src, dst;
    for (int k = 0; k < 8; ++k) {
      src.push_back({u(rng), u(rng)});
      dst.push_back(s(src.back()));
    }
    const SimilarityFit f = fit_similarity(src, dst);
    EXPECT_EQ(f.map.reflect, s.reflect);
    EXPECT_NEAR(f.map.scale, s.scale, 1e-12);
    EXPECT_LT(f.residual, 1e-12);
  }
}

TEST(FitSimilarity, Degenerate) {
  const std::vector<Vec2> line{{0, 0}, {1, 1}, {2, 2}};
  EXPECT_THROW(fit_similarity(line, line), DegenerateError);
  const std::vector<Vec2> two{{0, 0}, {1, 0}};
  EXPECT_THROW(fit_similarity(two, two), DegenerateError);
  const std::vector<Vec2> three{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW(fit_similarity(three, two), DomainError);
}

TEST(Boxes, BoundingBoxContainsPoints) {
  const auto pts = landmarks();
  const Vec2 axis = unit_vector(0.3);
  const OrientedBox b = bounding_box(pts, axis);
  const Polygon poly = to_polygon(b);
  EXPECT_GE(containment_clearance(poly, Polygon(pts.begin(), pts.end())), -1e-12);
  EXPECT_GE(b.half_extents.x, 0);
  EXPECT_GE(b.half_extents.y, 0);
}

TEST(Polygons, SeparationSigns) {
  const Polygon a = make_ccw({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const Polygon touching = make_ccw({{1, 0}, {2, 0}, {2, 1}, {1, 1}});
  const Polygon apart = make_ccw({{1.5, 0}, {2, 0}, {2, 1}, {1.5, 1}});
  const Polygon overlap = make_ccw({{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}});
  EXPECT_NEAR(separation(a, touching), 0.0, 1e-15);
  EXPECT_NEAR(separation(a, apart), 0.5, 1e-15);
  EXPECT_NEAR(separation(a, overlap), -0.5, 1e-15);
  EXPECT_NEAR(containment_clearance(a, make_ccw({{0.25, 0.25}, {0.5, 0.25}, {0.5, 0.5}})), 0.25, 1e-15);
}
