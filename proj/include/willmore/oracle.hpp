#ifndef WILLMORE_ORACLE_HPP
#define WILLMORE_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "willmore/energies.hpp"
#include "willmore/errors.hpp"
#include "willmore/geometry.hpp"
#include "willmore/grid.hpp"
#include "willmore/laminate.hpp"
#include "willmore/parallel.hpp"

namespace willmore {

namespace detail {

// Compactly supported C^3 bump (1 - |z|^2)^4 in an ellipse with centre, axes and rotation.
struct Bump {
  Vec2 centre;
  double r1, r2, angle;

  double operator()(Vec2 p) const {
    const double c = std::cos(angle), s = std::sin(angle);
    const Vec2 d = p - centre;
    const double z1 = (c * d.x + s * d.y) / r1;
    const double z2 = (-s * d.x + c * d.y) / r2;
    const double q = 1.0 - z1 * z1 - z2 * z2;
    return q > 0.0 ? q * q * q * q : 0.0;
  }
};

// Cell average of f_raw(v, xi + Hessian of a*bump) on an n x n node grid over the unit square.
inline double bump_average(const Penalty& p, const Tilt& v, const SymMat2& xi, const Bump& b, double a, int n) {
  const double h = 1.0 / (n - 1);
  const auto f = GridField::sample({0.0, 0.0}, h, n, n, [&](Vec2 q) { return a * b(q); });
  const auto H = fd_hessian(f);
  const double floor = roundoff_floor(f);
  return integrate_nodes(n, n, h, [&](int i, int j) { return f_raw(p, v, xi + snap(H.at(i, j), floor)); });
}

}  // namespace detail

/// Brute-force relaxed density: the smallest cell average of f_raw(v, xi + Hessian of phi) over
/// phi in {0, realized order-two laminate, random smooth bumps with a line search on amplitude}.
inline double numeric_Q2(const Penalty& p, const Tilt& v, const SymMat2& xi, const OracleConfig& cfg) {
  cfg.validate();
  double best = f_raw(p, v, xi);
  if (best == 0.0) return 0.0;

  try {
    const LaminateSpec L = build_laminate(p, v, xi);
    best = std::min(best, realize_laminate(L, cfg).measured_avg_f_raw);
  } catch (const ValidationError&) {
    // not admissible, or bands not resolvable at this refinement
  }

  constexpr int kBumpNodes = 65;
  constexpr int kLineSearchSteps = 24;
  const double scale = xi.frobenius() + p.sqrt_lambda();
  std::vector<double> results(static_cast<std::size_t>(cfg.multistarts), std::numeric_limits<double>::infinity());
  parallel_for(results.size(), [&](std::size_t k) {
    std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ull + k);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    detail::Bump b{{0.3 + 0.4 * U(rng), 0.3 + 0.4 * U(rng)}, 0.1 + 0.2 * U(rng), 0.1 + 0.2 * U(rng), 3.14159 * U(rng)};
    const double amax = scale * std::min(b.r1, b.r2) * std::min(b.r1, b.r2);
    auto F = [&](double a) { return detail::bump_average(p, v, xi, b, a, kBumpNodes); };
    // Golden-section search on [-amax, amax].
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = -amax, hi = amax;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = F(x1), f2 = F(x2);
    for (int it = 0; it < kLineSearchSteps; ++it) {
      if (f1 <= f2) {
        hi = x2, x2 = x1, f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = F(x1);
      } else {
        lo = x1, x1 = x2, f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = F(x2);
      }
    }
    results[k] = std::min(f1, f2);
  });
  // Deterministic merge: lowest start index wins ties.
  for (double r : results) best = std::min(best, r);
  return best;
}

/// Discrete transition energy of a profile w(t) on [-1/2, 1/2] for a jump datum: the tilt is
/// a.nu_perp nu_perp + w nu, the Hessian w' nu nu^T, integrated with the recession density.
inline double transition_energy(const JumpDatum& j, const std::vector<double>& w) {
  const int n = static_cast<int>(w.size());
  const double h = 1.0 / (n - 1);
  const Vec2 t = perp(j.nu);
  const double tang = dot(j.a.vec(), t);
  const SymMat2 nn = SymMat2::outer(j.nu);
  std::vector<double> vals(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double dw = detail::diff1([&](int m) { return w[m]; }, k, n, h);
    const Tilt v = Tilt::of(tang * t + w[k] * j.nu);
    vals[k] = ((k == 0 || k == n - 1) ? 0.5 : 1.0) * G_inf_density(v, dw * nn);
  }
  return pairwise_sum(vals) * h;
}

/// Minimum of transition_energy over a family of monotone ramps from a.nu to b.nu.
inline double numeric_jump_cost(const JumpDatum& j, int profile_points) {
  j.validate();
  if (profile_points < 16) throw ValidationError("numeric_jump_cost needs at least 16 profile points");
  const double wa = dot(j.a.vec(), j.nu), wb = dot(j.b.vec(), j.nu);
  if (wa == wb) return 0.0;
  const int n = profile_points;
  std::vector<std::function<double(double)>> ramps = {
      [](double r) { return r; },
      [](double r) { return r * r * (3.0 - 2.0 * r); },
      [](double r) { return detail::smoothstep5(r); },
      [](double r) { return 0.5 - 0.5 * std::cos(3.141592653589793 * r); },
  };
  double best = std::numeric_limits<double>::infinity();
  for (double width : {1.0, 0.5, 0.25})
    for (const auto& R : ramps) {
      std::vector<double> w(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) {
        const double t = -0.5 + static_cast<double>(k) / (n - 1);
        const double r = std::clamp(t / width + 0.5, 0.0, 1.0);
        w[k] = wa + (wb - wa) * R(r);
      }
      best = std::min(best, transition_energy(j, w));
    }
  return best;
}

struct SliceBound {
  double lhs;
  double rhs;
};

/// Slice energy of a sampled profile w on [-1/2, 1/2] at tangential slope a1, against the bound
/// by the turning angle of the end normals plus twice the backtracking.
inline SliceBound slice_energy_bound_check(double a1, const std::vector<double>& w) {
  const int n = static_cast<int>(w.size());
  if (n < 3) throw ValidationError("slice profile needs at least 3 points");
  for (double x : w)
    if (!std::isfinite(x)) throw ValidationError("slice profile must be finite");
  const double h = 1.0 / (n - 1);
  std::vector<double> energy(static_cast<std::size_t>(n)), back(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double dw = detail::diff1([&](int m) { return w[m]; }, k, n, h);
    const double wt = (k == 0 || k == n - 1) ? 0.5 : 1.0;
    energy[k] = wt * G_density({a1, w[k]}, SymMat2::diag(0.0, dw));
    back[k] = wt * std::max(0.0, -dw);
  }
  const double lhs = pairwise_sum(energy) * h;
  const double backtrack = pairwise_sum(back) * h;
  const double rhs = 2.0 * std::sqrt(1.0 + a1 * a1) * (turning_angle({a1, w.front()}, {a1, w.back()}) + 2.0 * backtrack);
  return {lhs, rhs};
}

/// Uniform grid of 2m+1 samples on [-half_width, half_width] with 0 as its middle sample.
inline std::vector<double> symmetric_grid(double half_width, int m) {
  std::vector<double> k(static_cast<std::size_t>(2 * m + 1));
  for (int i = -m; i <= m; ++i) k[i + m] = half_width * i / m;
  return k;
}

/// Discrete double Legendre-Fenchel transform of f1d_raw sampled on kappa.
/// The slope grid spans the slopes of the lower hull with four slopes per sample.
inline std::vector<double> convex_envelope_1d_numeric(const Penalty& p, const std::vector<double>& kappa) {
  const int n = static_cast<int>(kappa.size());
  if (n < 5) throw ValidationError("kappa grid too small");
  const double span = kappa.back() - kappa.front();
  const double dk = span / (n - 1);
  for (int i = 0; i < n; ++i) {
    if (std::fabs(kappa[i] + kappa[n - 1 - i]) > 1e-12 * span) throw ValidationError("kappa grid must be symmetric around 0");
    if (i > 0 && std::fabs(kappa[i] - kappa[i - 1] - dk) > 1e-9 * dk) throw ValidationError("kappa grid must be uniform");
  }
  if (n % 2 == 0) throw ValidationError("kappa grid must contain 0 (use an odd sample count)");
  if (kappa.back() < 2.0 * p.sqrt_lambda())
    throw ValidationError("kappa grid too narrow: it must span [-2 sqrt(lambda), 2 sqrt(lambda)]");

  std::vector<double> f(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) f[i] = i == n / 2 ? 0.0 : f1d_raw(p, kappa[i]);
  // Slopes of the lower hull lie between its first and last edge slopes.
  double smin = INFINITY, smax = -INFINITY;
  for (int i = 1; i < n; ++i) {
    smin = std::min(smin, (f[i] - f[0]) / (kappa[i] - kappa[0]));
    smax = std::max(smax, (f[n - 1] - f[i - 1]) / (kappa[n - 1] - kappa[i - 1]));
  }
  const int m = 4 * n;
  std::vector<double> slopes(static_cast<std::size_t>(m)), conj(static_cast<std::size_t>(m));
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t k) {
    const double s = smin + (smax - smin) * static_cast<double>(k) / (m - 1);
    double best = -INFINITY;
    for (int i = 0; i < n; ++i) best = std::max(best, s * kappa[i] - f[i]);
    slopes[k] = s;
    conj[k] = best;
  });
  std::vector<double> env(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    double best = -INFINITY;
    for (int k = 0; k < m; ++k) best = std::max(best, slopes[k] * kappa[i] - conj[k]);
    env[i] = best + 0.0;  // no negative zero
  });
  return env;
}

}  // namespace willmore

#endif  // WILLMORE_ORACLE_HPP
