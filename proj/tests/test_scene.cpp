#include <gtest/gtest.h>

#include <cmath>

#include "willmore/grid.hpp"
#include "willmore/scene.hpp"
#include "willmore/scene_io.hpp"

using namespace willmore;

namespace {

std::string scene_path(const char* name) { return std::string(WILLMORE_SCENE_DIR) + "/" + name; }

CubicPoly poly(std::initializer_list<std::pair<int, double>> terms) {
  CubicPoly p;
  for (auto [k, v] : terms) p.c[k] = v;
  return p;
}

GraphScene tent() { return load_scene(scene_path("tent.scene")); }

// Piecewise quadratic on a 2x2 split of the unit square, C^1 across both lines.
GraphScene smooth_quadrant_scene() {
  GraphScene s;
  const CubicPoly u = poly({{3, 0.5}, {4, 0.3}, {5, -0.2}, {1, 0.1}});
  for (double x0 : {0.0, 0.5})
    for (double y0 : {0.0, 0.5})
      s.cells.push_back({{{x0, y0}, {x0 + 0.5, y0}, {x0 + 0.5, y0 + 0.5}, {x0, y0 + 0.5}}, u});
  return s;
}

}  // namespace

TEST(SceneIo, LoadsTentAndRoundTrips) {
  const GraphScene s = tent();
  ASSERT_EQ(s.cells.size(), 2u);
  ASSERT_EQ(s.jumps.size(), 1u);
  const GraphScene t = parse_scene(scene_to_json(s));
  EXPECT_EQ(t.cells[1].u.c[0], 1.0);
  EXPECT_EQ(t.cells[1].u.c[2], -1.0);
  EXPECT_EQ(t.jumps[0].nu.y, 1.0);
}

TEST(SceneIo, RejectsUnknownKeysWithFieldPath) {
  try {
    parse_scene(R"({"domain": {"x0":0,"y0":0,"x1":1,"y1":1}, "cells": [{"polygon": [[0,0],[1,0],[1,1]], "coeffs": {"c04": 1}}]})");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("cells[0].coeffs.c04"), std::string::npos);
  }
  EXPECT_THROW(parse_scene(R"({"domain": {"x0":0,"y0":0,"x1":1,"y1":1}, "cells": [], "colour": 1})"), ValidationError);
}

TEST(SceneIo, SyntaxErrorReportsLine) {
  try {
    parse_scene("{\n  \"domain\": {\"x0\": 0,\n  \"y0\": }\n}");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(SceneIo, NormalizesClockwisePolygons) {
  const GraphScene s = parse_scene(
      R"({"domain": {"x0":0,"y0":0,"x1":1,"y1":1}, "cells": [{"polygon": [[0,0],[0,1],[1,1],[1,0]], "coeffs": {}}]})");
  EXPECT_TRUE(validate_scene(s).ok());
}

TEST(ValidateScene, TentPasses) {
  const auto d = validate_scene(tent());
  EXPECT_TRUE(d.ok()) << d.summary();
  EXPECT_TRUE(validate_scene(load_scene(scene_path("tilted_tent.scene"))).ok());
  EXPECT_TRUE(validate_scene(load_scene(scene_path("affine.scene"))).ok());
  EXPECT_TRUE(validate_scene(smooth_quadrant_scene()).ok());
}

TEST(ValidateScene, DetectsDiscontinuityOnTheRightEdge) {
  GraphScene s = tent();
  s.cells[1].u.c[0] += 1e-6;
  const auto d = validate_scene(s);
  ASSERT_TRUE(d.has(DefectKind::kContinuity));
  EXPECT_NE(d.summary().find("edge between cells 0 and 1"), std::string::npos);
}

TEST(ValidateScene, DetectsTangentialGradientJump) {
  // (1,0) below, (0,1) above across nu = (0,1): u continuous along y = 1/2 fails too, so make it continuous at x = 0.
  GraphScene s = tent();
  s.cells[0].u = poly({{1, 1.0}});
  s.cells[1].u = poly({{2, 1.0}, {0, -0.5}});
  const auto d = validate_scene(s);
  EXPECT_TRUE(d.has(DefectKind::kGradientStructure)) << d.summary();
}

TEST(ValidateScene, DetectsUndeclaredKinkAndTilingGap) {
  GraphScene s = tent();
  s.jumps.clear();
  EXPECT_TRUE(validate_scene(s).has(DefectKind::kGradientMismatch));
  GraphScene gap = tent();
  gap.cells[1].polygon = {{0, 0.5}, {1, 0.5}, {1, 0.9}, {0, 0.9}};
  EXPECT_TRUE(validate_scene(gap).has(DefectKind::kTiling));
  GraphScene overlap = tent();
  overlap.cells[1].polygon = {{0, 0.4}, {1, 0.4}, {1, 0.9}, {0, 0.9}};
  EXPECT_TRUE(validate_scene(overlap).has(DefectKind::kTiling));
}

TEST(ValidateScene, DetectsJumpOffTheEdges) {
  GraphScene s = tent();
  s.jumps[0].p0 = {0, 0.25};
  s.jumps[0].p1 = {1, 0.25};
  EXPECT_FALSE(validate_scene(s).ok());
}

TEST(LimitEnergy, AffineSceneIsZero) {
  const auto e = limit_energy(load_scene(scene_path("affine.scene")));
  EXPECT_EQ(e.bulk, 0.0);
  EXPECT_EQ(e.jump, 0.0);
  EXPECT_EQ(e.cantor, 0.0);
  EXPECT_EQ(e.total, 0.0);
}

TEST(LimitEnergy, TentIsPi) {
  const auto e = limit_energy(tent());
  EXPECT_EQ(e.bulk, 0.0);
  EXPECT_NEAR(e.jump, M_PI, 1e-12);
  EXPECT_NEAR(e.total, M_PI, 1e-12);
}

TEST(LimitEnergy, TiltedTent) {
  const auto e = limit_energy(load_scene(scene_path("tilted_tent.scene")));
  EXPECT_NEAR(e.jump, 2 * std::sqrt(2.0) * std::acos(2 / std::sqrt(6.0)), 1e-12);
  EXPECT_EQ(e.bulk, 0.0);
}

TEST(LimitEnergy, InvalidSceneThrows) {
  GraphScene s = tent();
  s.jumps.clear();
  EXPECT_THROW(limit_energy(s), ValidationError);
}

TEST(LimitEnergy, AdditiveOverSplitAlongNonJumpLine) {
  // Tent split at x = 1/2 into four cells with two jump pieces: the same totals as the two halves.
  GraphScene whole = tent();
  GraphScene split;
  split.domain = whole.domain;
  for (double x0 : {0.0, 0.5}) {
    split.cells.push_back({{{x0, 0}, {x0 + 0.5, 0}, {x0 + 0.5, 0.5}, {x0, 0.5}}, whole.cells[0].u});
    split.cells.push_back({{{x0, 0.5}, {x0 + 0.5, 0.5}, {x0 + 0.5, 1}, {x0, 1}}, whole.cells[1].u});
    split.jumps.push_back({{x0, 0.5}, {x0 + 0.5, 0.5}, {0, 1}});
  }
  ASSERT_TRUE(validate_scene(split).ok()) << validate_scene(split).summary();
  const auto a = limit_energy(whole), b = limit_energy(split);
  EXPECT_NEAR(a.jump, b.jump, 1e-9);
  EXPECT_NEAR(a.bulk, b.bulk, 1e-9);

  const GraphScene q = smooth_quadrant_scene();
  GraphScene one;
  one.cells.push_back({{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, q.cells[0].u});
  EXPECT_NEAR(limit_energy(q).bulk, limit_energy(one).bulk, 1e-9);
}

TEST(LimitEnergy, BulkMatchesFineRasterization) {
  const GraphScene q = smooth_quadrant_scene();
  const double bulk = limit_energy(q).bulk;
  const GridField f = rasterize(q, 513, 513);
  EXPECT_NEAR(energy_G(f), bulk, 0.01 * bulk);
  const GraphScene bowl = load_scene(scene_path("bowl.scene"));
  EXPECT_NEAR(energy_G(rasterize(bowl, 513, 513)), limit_energy(bowl).bulk, 0.01 * limit_energy(bowl).bulk);
  EXPECT_NEAR(limit_energy(bowl).bulk, 3.727977101370924, 1e-6);
}

TEST(Rasterize, ExactOnAffineAndTent) {
  const GraphScene a = load_scene(scene_path("affine.scene"));
  const GridField fa = rasterize(a, 33, 33);
  for (int j = 0; j < 33; ++j)
    for (int i = 0; i < 33; ++i) {
      const Vec2 p = fa.point(i, j);
      ASSERT_EQ(fa(i, j), a.cells[0].u.value(p));
    }
  const GridField ft = rasterize(tent(), 257, 257);
  double err = 0;
  for (int j = 0; j < 257; ++j)
    for (int i = 0; i < 257; ++i) err = std::max(err, std::fabs(ft(i, j) - (0.5 - std::fabs(ft.point(i, j).y - 0.5))));
  EXPECT_EQ(err, 0.0);
  const auto g = fd_gradient(ft);
  for (int j = 0; j < 257; ++j) {
    if (std::abs(j - 128) <= 1) continue;
    for (int i = 0; i < 257; ++i) {
      ASSERT_NEAR(g.at(i, j).x, 0.0, 1e-12);
      ASSERT_NEAR(g.at(i, j).y, j < 128 ? 1.0 : -1.0, 1e-12);
    }
  }
}

TEST(Rasterize, RequiresEqualSpacing) { EXPECT_THROW(rasterize(tent(), 33, 65), ValidationError); }
