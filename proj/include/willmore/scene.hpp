#ifndef WILLMORE_SCENE_HPP
#define WILLMORE_SCENE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "willmore/energies.hpp"
#include "willmore/errors.hpp"
#include "willmore/geometry.hpp"
#include "willmore/grid.hpp"
#include "willmore/quadrature.hpp"

namespace willmore {

/// Polynomial of total degree <= 3 in global coordinates.
/// Coefficient order: c00, c10, c01, c20, c11, c02, c30, c21, c12, c03 (c_ij multiplies x^i y^j).
struct CubicPoly {
  std::array<double, 10> c{};

  double value(Vec2 p) const {
    const double x = p.x, y = p.y;
    return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y + c[6] * x * x * x +
           c[7] * x * x * y + c[8] * x * y * y + c[9] * y * y * y;
  }
  Vec2 gradient(Vec2 p) const {
    const double x = p.x, y = p.y;
    return {c[1] + 2.0 * c[3] * x + c[4] * y + 3.0 * c[6] * x * x + 2.0 * c[7] * x * y + c[8] * y * y,
            c[2] + c[4] * x + 2.0 * c[5] * y + c[7] * x * x + 2.0 * c[8] * x * y + 3.0 * c[9] * y * y};
  }
  SymMat2 hessian(Vec2 p) const {
    const double x = p.x, y = p.y;
    return {2.0 * c[3] + 6.0 * c[6] * x + 2.0 * c[7] * y, c[4] + 2.0 * c[7] * x + 2.0 * c[8] * y,
            2.0 * c[5] + 2.0 * c[8] * x + 6.0 * c[9] * y};
  }
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double area() const { return (x1 - x0) * (y1 - y0); }
  double diameter() const { return std::hypot(x1 - x0, y1 - y0); }
};

struct Cell {
  std::vector<Vec2> polygon;  ///< convex, counter-clockwise
  CubicPoly u;
};

/// Straight piece of the gradient jump set with unit normal nu pointing to the plus side.
struct JumpSegment {
  Vec2 p0, p1, nu;
};

struct GraphScene {
  Rect domain;
  std::vector<Cell> cells;
  std::vector<JumpSegment> jumps;
};

struct EnergyBreakdown {
  double bulk = 0.0;
  double jump = 0.0;
  double cantor = 0.0;  ///< scenes carry no Cantor part
  double total = 0.0;
};

enum class DefectKind { kCellGeometry, kTiling, kContinuity, kGradientMismatch, kGradientStructure, kJumpGeometry };

inline const char* to_string(DefectKind k) {
  switch (k) {
    case DefectKind::kCellGeometry: return "cell geometry";
    case DefectKind::kTiling: return "tiling";
    case DefectKind::kContinuity: return "continuity";
    case DefectKind::kGradientMismatch: return "gradient mismatch";
    case DefectKind::kGradientStructure: return "gradient structure";
    case DefectKind::kJumpGeometry: return "jump geometry";
  }
  return "?";
}

struct Defect {
  DefectKind kind;
  std::string where;  ///< e.g. "edge between cells 0 and 1"
  Vec2 location;
  double magnitude;
};

struct SceneDiagnostics {
  std::vector<Defect> defects;

  bool ok() const { return defects.empty(); }
  bool has(DefectKind k) const {
    return std::any_of(defects.begin(), defects.end(), [k](const Defect& d) { return d.kind == k; });
  }
  std::string summary() const {
    std::ostringstream os;
    os.precision(6);
    for (const Defect& d : defects)
      os << to_string(d.kind) << " defect at " << d.where << " near (" << d.location.x << ", " << d.location.y
         << "), magnitude " << d.magnitude << "\n";
    return os.str();
  }
};

inline constexpr double kSceneValueTolerance = 1e-9;
inline constexpr double kSceneAreaTolerance = 1e-12;

namespace detail {

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline double signed_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) a += cross(poly[k], poly[(k + 1) % poly.size()]);
  return 0.5 * a;
}

inline Vec2 centroid(const std::vector<Vec2>& poly) {
  Vec2 c;
  for (Vec2 p : poly) c = c + p;
  return (1.0 / poly.size()) * c;
}

// Point in a counter-clockwise convex polygon, boundary included up to tol.
inline bool contains(const std::vector<Vec2>& poly, Vec2 p, double tol) {
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Vec2 a = poly[k];
    const Vec2 b = poly[(k + 1) % poly.size()];
    const Vec2 e = b - a;
    if (cross(e, p - a) < -tol * norm(e)) return false;
  }
  return true;
}

// Sutherland-Hodgman clip of a convex polygon by another (both counter-clockwise).
inline std::vector<Vec2> clip(std::vector<Vec2> subject, const std::vector<Vec2>& clipper) {
  for (std::size_t k = 0; k < clipper.size() && !subject.empty(); ++k) {
    const Vec2 a = clipper[k];
    const Vec2 e = clipper[(k + 1) % clipper.size()] - a;
    std::vector<Vec2> out;
    for (std::size_t m = 0; m < subject.size(); ++m) {
      const Vec2 p = subject[m];
      const Vec2 q = subject[(m + 1) % subject.size()];
      const double sp = cross(e, p - a);
      const double sq = cross(e, q - a);
      if (sp >= 0.0) out.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) out.push_back(p + (sp / (sp - sq)) * (q - p));
    }
    subject = std::move(out);
  }
  return subject;
}

// Overlap of two collinear segments: parameters along (a0 -> a1) of the common piece.
struct SharedPiece {
  int cell_a;
  int cell_b;
  Vec2 p0;
  Vec2 p1;
};

inline std::vector<SharedPiece> shared_edges(const GraphScene& s) {
  const double tol = 1e-12 * std::max(1.0, s.domain.diameter());
  std::vector<SharedPiece> out;
  const int n = static_cast<int>(s.cells.size());
  for (int i = 0; i < n; ++i) {
    const auto& P = s.cells[i].polygon;
    for (int j = i + 1; j < n; ++j) {
      const auto& Q = s.cells[j].polygon;
      for (std::size_t e = 0; e < P.size(); ++e) {
        const Vec2 a0 = P[e];
        const Vec2 a1 = P[(e + 1) % P.size()];
        const Vec2 d = a1 - a0;
        const double len = norm(d);
        const Vec2 t = (1.0 / len) * d;
        for (std::size_t f = 0; f < Q.size(); ++f) {
          const Vec2 b0 = Q[f];
          const Vec2 b1 = Q[(f + 1) % Q.size()];
          if (std::fabs(cross(t, b0 - a0)) > tol || std::fabs(cross(t, b1 - a0)) > tol) continue;
          double s0 = dot(b0 - a0, t), s1 = dot(b1 - a0, t);
          if (s0 > s1) std::swap(s0, s1);
          const double lo = std::max(0.0, s0);
          const double hi = std::min(len, s1);
          if (hi - lo <= tol) continue;
          out.push_back({i, j, a0 + lo * t, a0 + hi * t});
        }
      }
    }
  }
  return out;
}

// Parameter of point p along segment (q0 -> q1) if p lies on it, else nullopt.
inline std::optional<double> on_segment(Vec2 p, Vec2 q0, Vec2 q1, double tol) {
  const Vec2 d = q1 - q0;
  const double len = norm(d);
  const Vec2 t = (1.0 / len) * d;
  if (std::fabs(cross(t, p - q0)) > tol) return std::nullopt;
  const double s = dot(p - q0, t);
  if (s < -tol || s > len + tol) return std::nullopt;
  return s / len;
}

inline int jump_containing(const GraphScene& s, Vec2 p0, Vec2 p1, double tol) {
  for (std::size_t k = 0; k < s.jumps.size(); ++k) {
    const auto& J = s.jumps[k];
    if (on_segment(p0, J.p0, J.p1, tol) && on_segment(p1, J.p0, J.p1, tol)) return static_cast<int>(k);
  }
  return -1;
}

// Splits every shared edge at the jump endpoints lying strictly inside it.
inline std::vector<SharedPiece> split_at_jump_ends(const GraphScene& s, std::vector<SharedPiece> pieces, double tol) {
  std::vector<SharedPiece> out;
  for (const SharedPiece& pc : pieces) {
    std::vector<double> cuts{0.0, 1.0};
    for (const auto& J : s.jumps)
      for (Vec2 q : {J.p0, J.p1})
        if (auto t = on_segment(q, pc.p0, pc.p1, tol); t && *t > 1e-12 && *t < 1.0 - 1e-12) cuts.push_back(*t);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const Vec2 d = pc.p1 - pc.p0;
      out.push_back({pc.cell_a, pc.cell_b, pc.p0 + cuts[k] * d, pc.p0 + cuts[k + 1] * d});
    }
  }
  return out;
}

inline std::string edge_name(int a, int b) {
  return "edge between cells " + std::to_string(a) + " and " + std::to_string(b);
}

}  // namespace detail

/// Checks tiling, continuity of u, and the structure of the gradient jumps.
inline SceneDiagnostics validate_scene(const GraphScene& s) {
  SceneDiagnostics diag;
  const double len_tol = 1e-12 * std::max(1.0, s.domain.diameter());
  const double area_tol = kSceneAreaTolerance * std::max(1.0, s.domain.area());
  auto add = [&](DefectKind k, std::string where, Vec2 at, double mag) {
    diag.defects.push_back({k, std::move(where), at, mag});
  };

  if (!(s.domain.x1 > s.domain.x0) || !(s.domain.y1 > s.domain.y0))
    add(DefectKind::kTiling, "domain", {s.domain.x0, s.domain.y0}, 0.0);
  if (s.cells.empty()) add(DefectKind::kTiling, "scene has no cells", {}, s.domain.area());

  double total = 0.0;
  for (std::size_t c = 0; c < s.cells.size(); ++c) {
    const auto& P = s.cells[c].polygon;
    const std::string name = "cell " + std::to_string(c);
    if (P.size() < 3) {
      add(DefectKind::kCellGeometry, name + " has fewer than 3 vertices", {}, 0.0);
      continue;
    }
    const double a = detail::signed_area(P);
    if (a <= area_tol) add(DefectKind::kCellGeometry, name + " is degenerate or clockwise", detail::centroid(P), a);
    for (std::size_t k = 0; k < P.size(); ++k) {
      const Vec2 e0 = P[(k + 1) % P.size()] - P[k];
      const Vec2 e1 = P[(k + 2) % P.size()] - P[(k + 1) % P.size()];
      if (detail::cross(e0, e1) < -len_tol * norm(e0))
        add(DefectKind::kCellGeometry, name + " is not convex", P[(k + 1) % P.size()], detail::cross(e0, e1));
      const Vec2 q = P[k];
      const double out = std::max({s.domain.x0 - q.x, q.x - s.domain.x1, s.domain.y0 - q.y, q.y - s.domain.y1});
      if (out > len_tol) add(DefectKind::kTiling, name + " leaves the domain", q, out);
    }
    total += a;
  }
  if (std::fabs(total - s.domain.area()) > area_tol)
    add(DefectKind::kTiling, "sum of cell areas", {s.domain.x0, s.domain.y0}, total - s.domain.area());
  for (std::size_t i = 0; i < s.cells.size(); ++i)
    for (std::size_t j = i + 1; j < s.cells.size(); ++j) {
      if (s.cells[i].polygon.size() < 3 || s.cells[j].polygon.size() < 3) continue;
      const auto overlap = detail::clip(s.cells[i].polygon, s.cells[j].polygon);
      if (overlap.size() >= 3) {
        const double a = detail::signed_area(overlap);
        if (a > area_tol)
          add(DefectKind::kTiling, "cells " + std::to_string(i) + " and " + std::to_string(j) + " overlap",
              detail::centroid(overlap), a);
      }
    }
  if (!diag.ok()) return diag;  // edge checks assume a proper tiling

  for (std::size_t k = 0; k < s.jumps.size(); ++k) {
    const auto& J = s.jumps[k];
    const std::string name = "jump segment " + std::to_string(k);
    const Vec2 d = J.p1 - J.p0;
    if (norm(d) <= len_tol) {
      add(DefectKind::kJumpGeometry, name + " has zero length", J.p0, 0.0);
      continue;
    }
    if (std::fabs(norm(J.nu) - 1.0) > 1e-12) add(DefectKind::kJumpGeometry, name + " normal is not unit", J.p0, norm(J.nu));
    if (std::fabs(dot(J.nu, d)) > 1e-12 * norm(d))
      add(DefectKind::kJumpGeometry, name + " normal is not perpendicular", J.p0, dot(J.nu, d) / norm(d));
  }

  const GaussRule g = gauss_legendre(5);
  const auto pieces = detail::split_at_jump_ends(s, detail::shared_edges(s), len_tol);
  std::vector<double> covered(s.jumps.size(), 0.0);
  for (const auto& pc : pieces) {
    const int jump = detail::jump_containing(s, pc.p0, pc.p1, len_tol);
    const auto& A = s.cells[pc.cell_a].u;
    const auto& B = s.cells[pc.cell_b].u;
    const Vec2 d = pc.p1 - pc.p0;
    const Vec2 t = (1.0 / norm(d)) * d;
    if (jump >= 0) covered[jump] += norm(d);
    double du = 0.0, dg = 0.0, dgt = 0.0;
    Vec2 at_u = pc.p0, at_g = pc.p0, at_t = pc.p0;
    for (double x : g.nodes) {
      const Vec2 q = pc.p0 + (0.5 * (x + 1.0)) * d;
      const double eu = std::fabs(A.value(q) - B.value(q));
      const Vec2 jg = A.gradient(q) - B.gradient(q);
      if (eu > du) du = eu, at_u = q;
      if (norm(jg) > dg) dg = norm(jg), at_g = q;
      if (std::fabs(dot(jg, t)) > dgt) dgt = std::fabs(dot(jg, t)), at_t = q;
    }
    const std::string name = detail::edge_name(pc.cell_a, pc.cell_b);
    if (du > kSceneValueTolerance) add(DefectKind::kContinuity, name, at_u, du);
    if (jump >= 0) {
      if (dgt > kSceneValueTolerance)
        add(DefectKind::kGradientStructure, name + " on jump segment " + std::to_string(jump), at_t, dgt);
    } else if (dg > kSceneValueTolerance) {
      add(DefectKind::kGradientMismatch, name + " (gradient jump not declared)", at_g, dg);
    }
  }
  for (std::size_t k = 0; k < s.jumps.size(); ++k) {
    const double len = norm(s.jumps[k].p1 - s.jumps[k].p0);
    if (std::fabs(covered[k] - len) > 1e-9 * std::max(1.0, len))
      add(DefectKind::kJumpGeometry, "jump segment " + std::to_string(k) + " does not run along interior cell edges",
          s.jumps[k].p0, len - covered[k]);
  }
  return diag;
}

/// Bulk, jump and Cantor parts of the limit functional for a valid scene.
inline EnergyBreakdown limit_energy(const GraphScene& s) {
  const SceneDiagnostics diag = validate_scene(s);
  if (!diag.ok()) throw ValidationError("invalid scene:\n" + diag.summary());

  constexpr int kOrder = 8;
  const GaussRule g = gauss_legendre(kOrder);
  EnergyBreakdown e;

  // Bulk: fan triangulation, collapsed tensor Gauss rule on each triangle.
  for (const Cell& c : s.cells) {
    const auto& P = c.polygon;
    for (std::size_t k = 1; k + 1 < P.size(); ++k) {
      const Vec2 a = P[0], b = P[k], d = P[k + 1];
      const double jac = 2.0 * 0.5 * detail::cross(b - a, d - a);
      for (int m = 0; m < kOrder; ++m) {
        const double xi = 0.5 * (g.nodes[m] + 1.0);
        for (int n = 0; n < kOrder; ++n) {
          const double eta = 0.5 * (g.nodes[n] + 1.0);
          const double w = 0.25 * g.weights[m] * g.weights[n] * (1.0 - xi) * jac;
          const Vec2 q = a + xi * (b - a) + ((1.0 - xi) * eta) * (d - a);
          e.bulk += w * G_density(Tilt::of(c.u.gradient(q)), c.u.hessian(q));
        }
      }
    }
  }

  // Jump: split each segment at cell vertices on it, then evaluate both one-sided gradients.
  const double tol = 1e-12 * std::max(1.0, s.domain.diameter());
  const auto pieces = detail::shared_edges(s);
  for (const JumpSegment& J : s.jumps) {
    std::vector<double> cuts{0.0, 1.0};
    for (const Cell& c : s.cells)
      for (Vec2 q : c.polygon)
        if (auto t = detail::on_segment(q, J.p0, J.p1, tol); t && *t > 1e-12 && *t < 1.0 - 1e-12) cuts.push_back(*t);
    std::sort(cuts.begin(), cuts.end());
    const Vec2 d = J.p1 - J.p0;
    const Vec2 tangent = perp(J.nu);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const Vec2 q0 = J.p0 + cuts[k] * d;
      const Vec2 q1 = J.p0 + cuts[k + 1] * d;
      const Vec2 mid = 0.5 * (q0 + q1);
      const CubicPoly* plus = nullptr;
      const CubicPoly* minus = nullptr;
      for (const auto& pc : pieces) {
        if (!detail::on_segment(mid, pc.p0, pc.p1, tol)) continue;
        for (int id : {pc.cell_a, pc.cell_b}) {
          const bool is_plus = dot(detail::centroid(s.cells[id].polygon) - mid, J.nu) > 0.0;
          (is_plus ? plus : minus) = &s.cells[id].u;
        }
        break;
      }
      if (!plus || !minus) throw ValidationError("jump segment piece without cells on both sides");
      const double len = norm(q1 - q0);
      for (int m = 0; m < kOrder; ++m) {
        const Vec2 q = q0 + (0.5 * (g.nodes[m] + 1.0)) * (q1 - q0);
        const Vec2 gp = plus->gradient(q);
        const Vec2 gm = minus->gradient(q);
        const double tang = 0.5 * (dot(gp, tangent) + dot(gm, tangent));
        e.jump += 0.5 * g.weights[m] * len * 2.0 * turning_angle(Tilt::of(gp), Tilt::of(gm)) *
                  std::sqrt(1.0 + tang * tang);
      }
    }
  }
  e.total = e.bulk + e.jump + e.cantor;
  return e;
}

/// Samples u at the nodes of an nx by ny grid spanning the scene domain.
inline GridField rasterize(const GraphScene& s, int nx, int ny) {
  if (nx < GridField::kMinNodes || ny < GridField::kMinNodes) throw ValidationError("grid too small");
  const double h = (s.domain.x1 - s.domain.x0) / (nx - 1);
  const double hy = (s.domain.y1 - s.domain.y0) / (ny - 1);
  if (std::fabs(h - hy) > 1e-12 * h)
    throw ValidationError("rasterize needs equal spacing in x and y for this domain and node count");
  const double tol = 1e-12 * std::max(1.0, s.domain.diameter());
  return GridField::sample({s.domain.x0, s.domain.y0}, h, nx, ny, [&](Vec2 p) {
    for (const Cell& c : s.cells)
      if (detail::contains(c.polygon, p, tol)) return c.u.value(p);
    throw ValidationError("grid node outside every cell");
  });
}

}  // namespace willmore

#endif  // WILLMORE_SCENE_HPP
