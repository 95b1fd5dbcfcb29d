#ifndef WILLMORE_RECOVERY_HPP
#define WILLMORE_RECOVERY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "willmore/csv.hpp"
#include "willmore/energies.hpp"
#include "willmore/errors.hpp"
#include "willmore/grid.hpp"
#include "willmore/laminate.hpp"
#include "willmore/mollify.hpp"
#include "willmore/scene.hpp"

namespace willmore {

/// Field of the form u = a * t + U(s) where s is one grid axis and t the other: a straight
/// ridge (or valley) parallel to a grid axis, with constant slope a along it.
struct AxisRidge {
  bool profile_along_y;     ///< U depends on y; the ridge runs along x
  double tangential_slope;  ///< a
  std::vector<double> profile;  ///< U at the nodes of the profile axis, with U(0) = u(0, 0)
};

/// Detects an axis ridge up to rounding of the node values.
inline std::optional<AxisRidge> detect_axis_ridge(const GridField& f) {
  const int nx = f.nx(), ny = f.ny();
  const double h = f.spacing();
  const double tol = 1e-9 * std::max(1.0, f.max_abs());
  auto try_axis = [&](bool along_y) -> std::optional<AxisRidge> {
    // Tangential index i, profile index j.
    const int nt = along_y ? nx : ny, ns = along_y ? ny : nx;
    auto u = [&](int i, int j) { return along_y ? f(i, j) : f(j, i); };
    const double a = (u(nt - 1, 0) - u(0, 0)) / ((nt - 1) * h);
    for (int j = 0; j < ns; ++j)
      for (int i = 0; i < nt; ++i)
        if (std::fabs(u(i, j) - u(0, j) - a * i * h) > tol) return std::nullopt;
    AxisRidge r{along_y, a, std::vector<double>(static_cast<std::size_t>(ns))};
    for (int j = 0; j < ns; ++j) r.profile[j] = u(0, j);
    return r;
  };
  if (auto r = try_axis(true)) return r;
  return try_axis(false);
}

struct ProfileCorrection {
  std::vector<double> profile;
  int pieces = 0;      ///< monotone curved pieces found
  int slabs = 0;       ///< slabs rebuilt as flat / arc / flat
  int left_alone = 0;  ///< slabs where the arc did not fit and the input was kept
};

namespace detail {

// Discrete principal curvature at a node between interval slopes sl and sr of the profile of
// a*t + Z(s), with c = sqrt(1 + a^2): FD second derivative times c^2 / w^3, w from the central slope.
inline double node_curvature(double sl, double sr, double h, double c) {
  const double P = 0.5 * (sl + sr);
  return (sr - sl) / h * c * c / std::pow(c * c + P * P, 1.5);
}

// Slope x > s of the next interval with node_curvature(s, x) = k > 0, or NaN when k exceeds the
// largest discrete curvature reachable from s. The curvature rises in x up to the interval slope
// 2P - s with P = (3s + sqrt(9s^2 + 8c^2)) / 4 and falls after it; the root is bracketed below that.
inline double next_slope_up(double s, double k, double h, double c) {
  const double P = 0.25 * (3.0 * s + std::sqrt(9.0 * s * s + 8.0 * c * c));
  double lo = s, hi = 2.0 * P - s;
  if (node_curvature(s, hi, h, c) < k) return std::numeric_limits<double>::quiet_NaN();
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::fabs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (node_curvature(s, mid, h, c) < k ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Interval slopes after `nodes` arc nodes of discrete curvature k, starting from slope s0.
// Fills `out` with the n - 1 slopes between arc nodes and returns the slope after the last one,
// or NaN when k cannot be reached. Curvature is odd in the slopes, so k < 0 is mirrored.
inline double arc_slopes(double s0, double k, int nodes, double h, double c, std::vector<double>* out) {
  const double sg = k < 0.0 ? -1.0 : 1.0;
  double s = sg * s0;
  for (int m = 0; m < nodes; ++m) {
    const double x = next_slope_up(s, sg * k, h, c);
    if (std::isnan(x)) return x;
    if (out && m + 1 < nodes) out->push_back(sg * x);
    s = x;
  }
  return sg * s;
}

// Rebuilds Z on the open node range (ja, jb] as flat at slope Pa, `n` arc nodes whose discrete
// curvature is one common value near +-sqrt(lambda), and flat at slope Pb. The arc position is the
// node that brings Z(jb) closest to `target`. Returns false when there is nothing to turn or the
// arc does not fit, leaving Z untouched.
inline bool rebuild_slab(std::vector<double>& Z, int ja, int jb, double Pa, double Pb, double target, double h,
                         double c, double k0, int first_free, int last_free) {
  if (std::fabs(Pb - Pa) <= 1e-14 * std::max(1.0, std::fabs(Pa))) return false;
  const double turn = Pb / std::hypot(c, Pb) - Pa / std::hypot(c, Pa);
  const double sgn = Pb > Pa ? 1.0 : -1.0;
  // Node count from the continuous arc length; coarse grids may need a few more nodes.
  const int n0 = std::max(1, static_cast<int>(std::lround(std::fabs(turn) / (k0 * h))));
  for (int n = n0; n <= n0 + 3; ++n) {
    const int lo = std::max(ja + 1, first_free), hi = std::min(jb - n, last_free - n + 1);
    if (lo > hi) return false;
    // Common curvature that lands on Pb after n nodes; unreachable curvatures count as overshoot.
    double klo = 0.0, khi = 4.0 * k0;
    for (int it = 0; it < 200; ++it) {
      const double km = 0.5 * (klo + khi);
      const double end = arc_slopes(Pa, sgn * km, n, h, c, nullptr);
      (!std::isnan(end) && (end - Pb) * sgn < 0.0 ? klo : khi) = km;
    }
    std::vector<double> mid;
    const double end = arc_slopes(Pa, sgn * 0.5 * (klo + khi), n, h, c, &mid);
    if (std::isnan(end) || std::fabs(end - Pb) > 1e-9 * std::max(1.0, std::fabs(Pb))) continue;
    double mid_sum = 0.0;
    for (double x : mid) mid_sum += x;
    // Z(jb) - Z(ja) = h [ (ts - ja) Pa + mid_sum + (jb - ts - n + 1) Pb ] for arc nodes ts .. ts+n-1.
    const double ts_real = ja + ((target - Z[ja]) / h - mid_sum - (jb - ja - n + 1) * Pb) / (Pa - Pb);
    const int ts = std::clamp(static_cast<int>(std::lround(ts_real)), lo, hi);
    double z = Z[ja];
    for (int j = ja + 1; j <= jb; ++j) {
      // Slope of the interval (j-1, j).
      const int arc_pos = j - ts;
      const double s = j <= ts ? Pa : arc_pos < n ? mid[arc_pos - 1] : Pb;
      z += s * h;
      Z[j] = z;
    }
    return true;
  }
  return false;
}

}  // namespace detail

/// Replaces each curved stretch of a 1-D profile by flat pieces joined by arcs on which the
/// discrete nonzero principal curvature of the graph a*t + U(s) is constant and within a
/// relative 1/(2n) of sqrt(lambda), n being the arc's node count. Each monotone stretch is cut
/// into up to 8 slabs with at least 16 arc nodes each. Slopes of U are kept at slab ends and
/// values to within one node step; the remaining offset is carried to the right.
inline ProfileCorrection correct_profile(const std::vector<double>& U, double h, double tangential_slope,
                                         const Penalty& p) {
  constexpr int kMaxSlabs = 8;
  constexpr double kMinArcNodes = 16.0;
  const int n = static_cast<int>(U.size());
  ProfileCorrection out{U};
  if (n < 8) return out;
  double umax = 0.0;
  for (double x : U) umax = std::max(umax, std::fabs(x));
  const double floor = 4096.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, umax) / (h * h);
  std::vector<int> sign(static_cast<std::size_t>(n), 0);
  for (int j = 1; j + 1 < n; ++j) {
    const double d2 = (U[j + 1] - 2.0 * U[j] + U[j - 1]) / (h * h);
    sign[j] = d2 > floor ? 1 : d2 < -floor ? -1 : 0;
  }
  auto slope = [&](int j) { return detail::diff1([&](int m) { return U[m]; }, j, n, h); };
  const double c = std::sqrt(1.0 + tangential_slope * tangential_slope);
  const double k0 = p.sqrt_lambda();
  // One-sided stencils at the ends reach three nodes in; keep arcs clear of them.
  const int first_free = 3, last_free = n - 4;

  std::vector<double>& Z = out.profile;
  double offset = 0.0;  // Z - U carried from the left
  int done = 0;         // Z is final on [0, done]
  auto copy_through = [&](int j) {
    for (int m = done + 1; m <= j; ++m) Z[m] = U[m] + offset;
    done = std::max(done, j);
  };
  int prev_end = 0;
  for (int j = 1; j + 1 < n;) {
    if (sign[j] == 0) {
      ++j;
      continue;
    }
    int e = j;
    while (e + 1 < n - 1 && sign[e + 1] == sign[j]) ++e;
    const int A = std::max(j - 1, prev_end), B = std::min(e + 1, n - 1);
    prev_end = B;
    j = e + 1;
    if (B - A < 2) continue;
    ++out.pieces;
    copy_through(A);
    const double PA = slope(A), PB = slope(B);
    const double turn = std::fabs(PB / std::hypot(c, PB) - PA / std::hypot(c, PA));
    const double arc_nodes = turn / (k0 * h);
    const int slabs = std::clamp(static_cast<int>(arc_nodes / kMinArcNodes), 1, std::max(1, std::min(kMaxSlabs, (B - A) / 2)));
    int ja = A;
    for (int s = 1; s <= slabs; ++s) {
      const int jb = A + static_cast<int>(std::lround(static_cast<double>(s) * (B - A) / slabs));
      if (detail::rebuild_slab(Z, ja, jb, slope(ja), slope(jb), U[jb] + offset, h, c, k0, first_free, last_free)) {
        ++out.slabs;
        offset = Z[jb] - U[jb];
        done = jb;
      } else {
        ++out.left_alone;
        copy_through(jb);
      }
      ja = jb;
    }
  }
  copy_through(n - 1);
  return out;
}

/// Field a*t + Z(s) rebuilt from a ridge and a corrected profile on the geometry of f.
inline GridField ridge_field(const GridField& f, const AxisRidge& r, const std::vector<double>& Z) {
  const double h = f.spacing();
  std::vector<double> vals(static_cast<std::size_t>(f.nx()) * f.ny());
  for (int j = 0; j < f.ny(); ++j)
    for (int i = 0; i < f.nx(); ++i)
      vals[static_cast<std::size_t>(j) * f.nx() + i] =
          r.profile_along_y ? Z[j] + r.tangential_slope * i * h : Z[i] + r.tangential_slope * j * h;
  return GridField(f.origin(), h, f.nx(), f.ny(), std::move(vals));
}

struct RecoveryRow {
  double lambda;
  double epsilon;
  double energy;               ///< F_lambda of the recovery field
  double energy_mollified;     ///< F_lambda of the mollified field before the corrector
  double energy_h_mollified;   ///< h_lambda energy of the mollified field
  double max_hessian;          ///< largest FD Hessian norm of the mollified field
  bool corrected;
  double gap;
};

struct RecoveryReport {
  double limit_value = 0.0;
  std::vector<RecoveryRow> rows;

  std::vector<double> lambdas() const { return column(&RecoveryRow::lambda); }
  std::vector<double> epsilons() const { return column(&RecoveryRow::epsilon); }
  std::vector<double> energies() const { return column(&RecoveryRow::energy); }
  std::vector<double> gaps() const { return column(&RecoveryRow::gap); }

  CsvTable table() const {
    CsvTable t({"lambda", "epsilon", "energy", "limit", "gap"});
    for (const auto& r : rows) t.add_row({r.lambda, r.epsilon, r.energy, limit_value, r.gap});
    return t;
  }

  CsvTable detail_table() const {
    CsvTable t({"lambda", "epsilon", "energy", "energy_mollified", "energy_h_mollified", "max_hessian", "corrected"});
    for (const auto& r : rows)
      t.add_row({r.lambda, r.epsilon, r.energy, r.energy_mollified, r.energy_h_mollified, r.max_hessian,
                 static_cast<long long>(r.corrected)});
    return t;
  }

 private:
  std::vector<double> column(double RecoveryRow::*m) const {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r.*m);
    return v;
  }
};

struct RecoveryOptions {
  std::vector<double> epsilon_ladder;  ///< empty: dyadic_ladder of the rasterized field
  bool apply_corrector = true;
};

/// For each penalty: rasterize, pick epsilon from the ladder, mollify, sharpen axis ridges into
/// curvature-sqrt(lambda) arcs, and evaluate F_lambda against the limit energy of the scene.
inline RecoveryReport recovery_experiment(const GraphScene& s, const std::vector<double>& lambdas, int nodes,
                                          const RecoveryOptions& opt = {}) {
  if (lambdas.empty()) throw ValidationError("lambda ladder is empty");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0) || !std::isfinite(lambdas[k])) throw ValidationError("lambda values must be positive");
    if (k > 0 && !(lambdas[k] > lambdas[k - 1])) throw ValidationError("lambda ladder must be increasing");
  }
  RecoveryReport rep;
  rep.limit_value = limit_energy(s).total;
  const double W = s.domain.x1 - s.domain.x0, H = s.domain.y1 - s.domain.y0;
  const int ny = static_cast<int>(std::lround((nodes - 1) * H / W)) + 1;
  const GridField f = rasterize(s, nodes, ny);
  EpsilonLadder ladder(f, opt.epsilon_ladder.empty() ? dyadic_ladder(f) : opt.epsilon_ladder);
  const auto ridge = detect_axis_ridge(f);

  for (double lam : lambdas) {
    const Penalty p(lam);
    const std::size_t k = ladder.choose(p);
    const GridField& u = ladder.mollified(k);
    RecoveryRow row{};
    row.lambda = lam;
    row.epsilon = ladder.epsilons()[k];
    row.max_hessian = ladder.max_hessian(k);
    row.energy_mollified = energy_F_lambda(u, p);
    row.energy_h_mollified = energy_h_lambda(u, p);
    row.energy = row.energy_mollified;
    if (opt.apply_corrector && ridge) {
      // Mollification keeps the ridge structure; read the profile off the mollified field.
      if (const auto r = detect_axis_ridge(u)) {
        const ProfileCorrection pc = correct_profile(r->profile, u.spacing(), r->tangential_slope, p);
        if (pc.slabs > 0) {
          row.energy = energy_F_lambda(ridge_field(u, *r, pc.profile), p);
          row.corrected = true;
        }
      }
    }
    row.gap = std::fabs(row.energy - rep.limit_value);
    rep.rows.push_back(row);
  }
  return rep;
}

/// Quadratic potential on a square cell: value + gradient.(x - centre) + (x - centre)^T hessian (x - centre) / 2.
struct CellPotential {
  Vec2 centre{0.5, 0.5};
  double side = 1.0;
  double value = 0.0;
  Vec2 gradient;
  SymMat2 hessian;

  double operator()(Vec2 x) const {
    const Vec2 d = x - centre;
    return value + dot(gradient, d) + 0.5 * hessian.quad(d);
  }
};

struct CorrectorResult {
  GridField preview;              ///< corrected potential subsampled to at most 1025 nodes per side
  double avg_f_raw;               ///< cell average of f_raw(grad, Hessian) of the corrected potential
  double avg_f_raw_plain;         ///< same for the quadratic alone
  double avg_h_lambda_plain;      ///< cell average of h_lambda(grad, Hessian) of the quadratic alone
  double h_lambda_centre;         ///< h_lambda at the centre's tilt and Hessian
  double gradient_perturbation;   ///< sup over nodes of |FD gradient of the corrector|
  double laminate_gradient_sup;   ///< sup of |gradient| of the unit laminate over one period
  int nodes_per_side;
};

/// Adds M x M scaled copies of the order-two laminate for the centre's (tilt, Hessian) to a
/// quadratic cell potential and measures the cell average of f_raw with the true tilt. Each
/// copy carries `refinement` inner periods of kCellsPerInnerPeriod grid cells each.
inline CorrectorResult corrector_insertion(const CellPotential& w, const Penalty& p, int M, int refinement) {
  if (M < 1) throw ValidationError("M must be at least 1");
  if (!(w.side > 0.0)) throw ValidationError("cell side must be positive");
  const Tilt v0 = Tilt::of(w.gradient);
  const LaminateSpec L = build_laminate(p, v0, w.hessian);
  OracleConfig{refinement, 1, 1e-9, 1}.validate();
  const LaminatePotential phi(L, refinement);

  const double r = w.side;
  const Vec2 corner = w.centre - Vec2{0.5 * r, 0.5 * r};
  const double scale = r / M;
  auto corrector = [&](Vec2 x) { return scale * scale * phi((1.0 / scale) * (x - corner)); };
  auto total = [&](Vec2 x) { return w(x) + corrector(x); };

  const int cells = M * refinement * kCellsPerInnerPeriod;
  const int n = cells + 1;
  const double h = r / cells;
  double umax = 0.0;
  for (int j = 0; j <= 8; ++j)
    for (int i = 0; i <= 8; ++i) umax = std::max(umax, std::fabs(total(corner + Vec2{i * r / 8, j * r / 8})));
  const double floor = 4096.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, umax) / (h * h);

  std::vector<double> row_sup(static_cast<std::size_t>(n), 0.0);
  const double integral = integrate_streamed(total, corner, h, n, [&](int i, int j, Vec2 g, const SymMat2& H) {
    const Vec2 x = corner + Vec2{i * h, j * h};
    const Vec2 base = w.gradient + w.hessian.apply(x - w.centre);
    row_sup[j] = std::max(row_sup[j], norm(g - base));
    return f_raw(p, Tilt::of(g), snap(H, floor));
  });
  double sup = 0.0;
  for (double s : row_sup) sup = std::max(sup, s);

  const int plain_n = std::min(n, 1025);
  const double plain_h = r / (plain_n - 1);
  const double plain = integrate_streamed(w, corner, plain_h, plain_n, [&](int, int, Vec2 g, const SymMat2& H) {
    return f_raw(p, Tilt::of(g), H);
  });
  const double plain_h_energy = integrate_streamed(w, corner, plain_h, plain_n, [&](int, int, Vec2 g, const SymMat2& H) {
    return h_lambda(p, Tilt::of(g), H);
  });

  const int unit_n = refinement * kCellsPerInnerPeriod + 1;
  double lam_sup = 0.0;
  for (int j = 0; j < unit_n; ++j)
    for (int i = 0; i < unit_n; ++i)
      lam_sup = std::max(lam_sup, norm(phi.gradient({static_cast<double>(i) / (unit_n - 1), static_cast<double>(j) / (unit_n - 1)})));

  int stride = 1;
  while ((cells / stride) > 1024 || cells % stride != 0) ++stride;
  const int pn = cells / stride + 1;
  GridField preview = GridField::sample(corner, h * stride, pn, pn, total);

  return {std::move(preview),
          integral / (r * r),
          plain / (r * r),
          plain_h_energy / (r * r),
          h_lambda(p, v0, w.hessian),
          sup,
          lam_sup,
          n};
}

}  // namespace willmore

#endif  // WILLMORE_RECOVERY_HPP
