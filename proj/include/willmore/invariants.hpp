#ifndef WILLMORE_INVARIANTS_HPP
#define WILLMORE_INVARIANTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "willmore/energies.hpp"
#include "willmore/laminate.hpp"
#include "willmore/mollify.hpp"
#include "willmore/oracle.hpp"
#include "willmore/sampling.hpp"
#include "willmore/scene.hpp"
#include "willmore/scene_io.hpp"

namespace willmore {

/// Outcome of one property check: the worst observed value against its bound.
struct CheckResult {
  std::string name;
  long long samples = 0;
  double worst = 0.0;
  double bound = 0.0;
  bool pass = false;
};

namespace detail {

inline CheckResult finish(std::string name, long long samples, double worst, double bound) {
  return {std::move(name), samples, worst, bound, worst <= bound};
}

inline double rel(double excess, double scale) { return excess / std::max(1.0, std::fabs(scale)); }

}  // namespace detail

/// Largest relative excess of h_lambda over f_raw.
inline CheckResult check_envelope_below_raw(std::uint64_t seed, int n) {
  Sampler s(seed);
  double worst = -INFINITY;
  for (int k = 0; k < n; ++k) {
    const Penalty p(s.log_uniform(1e-2, 1e4));
    const Tilt v = s.tilt(3);
    const SymMat2 xi = s.matrix(s.log_uniform(1e-2, 1e2));
    const double f = f_raw(p, v, xi);
    worst = std::max(worst, detail::rel(h_lambda(p, v, xi) - f, f));
  }
  return detail::finish("envelope_below_raw", n, worst, 1e-12);
}

/// Largest relative shortfall of g_lambda(xi) under 2 |xi|_inf.
inline CheckResult check_envelope_above_operator_norm(std::uint64_t seed, int n) {
  Sampler s(seed);
  double worst = -INFINITY;
  for (int k = 0; k < n; ++k) {
    const Penalty p(s.log_uniform(1e-2, 1e4));
    const SymMat2 xi = s.matrix(s.log_uniform(1e-2, 1e2));
    const double lower = 2.0 * op_norm(xi);
    worst = std::max(worst, detail::rel(lower - g_lambda(p, xi), lower));
  }
  return detail::finish("envelope_above_operator_norm", n, worst, 1e-12);
}

inline CheckResult check_scaling_identity(std::uint64_t seed, int n) {
  Sampler s(seed);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const Penalty p(s.log_uniform(1e-3, 1e5));
    const SymMat2 xi = s.matrix(s.log_uniform(1e-2, 1e3));
    const double lhs = g_lambda(p, xi);
    const double rhs = p.sqrt_lambda() * g_lambda(Penalty(1), (1 / p.sqrt_lambda()) * xi);
    worst = std::max(worst, std::fabs(lhs - rhs) / std::max(std::fabs(lhs), 1e-300));
  }
  return detail::finish("scaling_identity", n, worst, 1e-12);
}

/// Both branch formulas on matrices rescaled onto rho0 = sqrt(lambda).
inline CheckResult check_branch_continuity(std::uint64_t seed, int n) {
  Sampler s(seed);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const Penalty p(s.log_uniform(1e-3, 1e5));
    const SymMat2 xi = s.matrix(1.0);
    const SymMat2 edge = (p.sqrt_lambda() / rho0(xi)) * xi;
    const double up = g_lambda_upper(p, edge);
    worst = std::max(worst, detail::rel(std::fabs(g_lambda_lower(p, edge) - up), up));
  }
  return detail::finish("branch_continuity", n, worst, 1e-10);
}

inline CheckResult check_polyconvex_witness(std::uint64_t seed, int n) {
  Sampler s(seed);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const Tilt v = s.tilt(2);
    const SymMat2 xi = s.matrix(3);
    worst = std::max(worst, std::fabs(polyconvex_H(v, xi, xi.det()) - g_lambda(Penalty(1), shape_operator(v, xi))));
  }
  return detail::finish("polyconvex_witness", n, worst, 1e-10);
}

inline CheckResult check_polyconvex_midpoint(std::uint64_t seed, int n) {
  Sampler s(seed);
  double worst = -INFINITY;
  for (int k = 0; k < n; ++k) {
    const Tilt v = s.tilt(2);
    const SymMat2 x1 = s.matrix(3), x2 = s.matrix(3);
    const double A1 = s.uniform(-5, 5), A2 = s.uniform(-5, 5);
    const double mid = polyconvex_H(v, 0.5 * (x1 + x2), 0.5 * (A1 + A2));
    worst = std::max(worst, mid - 0.5 * (polyconvex_H(v, x1, A1) + polyconvex_H(v, x2, A2)));
  }
  return detail::finish("polyconvex_midpoint", n, worst, 1e-10);
}

/// Predicted laminate value against g_lambda(S) and the mixture identities, on random
/// (lambda, v, xi) with 0 < rho0(S) < sqrt(lambda).
inline CheckResult check_laminate_exactness(std::uint64_t seed, int n) {
  Sampler s(seed);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    for (;;) {
      const double lam = s.log_uniform(0.1, 1e3);
      const Tilt v = s.tilt(2.0);
      const SymMat2 xi = s.matrix(s.log_uniform(0.01, 10.0));
      const double r = rho0(shape_operator(v, xi));
      if (!(r > 1e-6 && r < 0.999 * std::sqrt(lam))) continue;
      const Penalty p(lam);
      const LaminateSpec L = build_laminate(p, v, xi);
      const double g = g_lambda(p, shape_operator(v, xi));
      worst = std::max({worst, detail::rel(std::fabs(L.predicted_value - g), g), L.mixture_defect()});
      break;
    }
  }
  return detail::finish("laminate_exactness", n, worst, 1e-10);
}

/// Sup distance between the discrete biconjugate and the closed form on the inner half of
/// a symmetric grid of 2m + 1 samples.
inline double envelope_1d_error(const Penalty& p, double half_width, int m) {
  const std::vector<double> kappa = symmetric_grid(half_width, m);
  const std::vector<double> env = convex_envelope_1d_numeric(p, kappa);
  double err = 0.0;
  for (std::size_t i = 0; i < kappa.size(); ++i)
    if (std::fabs(kappa[i]) <= 0.5 * half_width) err = std::max(err, std::fabs(env[i] - envelope_1d(p, kappa[i])));
  return err;
}

inline CheckResult check_envelope_1d() {
  return detail::finish("envelope_1d", 4097, envelope_1d_error(Penalty(4), 8.0, 2048), 1e-2);
}

/// Largest increase of lambda^{-1/2} times the 1-D envelope along lambda = 1, 4, 16, 64.
inline CheckResult check_scaled_envelope_monotone() {
  double worst = -INFINITY;
  for (int k = 0; k < 128; ++k) {
    const double kappa = -8.0 + 16.0 * k / 127.0;
    double prev = INFINITY;
    for (double l : {1.0, 4.0, 16.0, 64.0}) {
      const double cur = envelope_1d(Penalty(l), kappa) / std::sqrt(l);
      if (std::isfinite(prev)) worst = std::max(worst, cur - prev);
      prev = cur;
    }
  }
  return detail::finish("scaled_envelope_monotone", 128, worst, 1e-12);
}

/// Relative error of the profile minimization against the closed form: two analytic cases
/// followed by random data sharing a tangential component.
inline CheckResult check_jump_cost(std::uint64_t seed, int n, int profile_points) {
  std::vector<JumpDatum> data{{{0, 0}, {0, 1}, {0, 1}}, {{1, 0}, {1, 1}, {0, 1}}};
  Sampler s(seed);
  for (int k = 0; k < n; ++k) {
    const Vec2 nu = s.unit();
    const Vec2 t = perp(nu);
    const double tang = s.uniform(-2, 2);
    data.push_back({Tilt::of(tang * t + s.uniform(-2, 2) * nu), Tilt::of(tang * t + s.uniform(-2, 2) * nu), nu});
  }
  double worst = 0.0;
  for (const JumpDatum& j : data) {
    const double exact = jump_cost(j);
    worst = std::max(worst, std::fabs(numeric_jump_cost(j, profile_points) - exact) / exact);
  }
  return detail::finish("jump_cost", static_cast<long long>(data.size()), worst, 1e-2);
}

/// Largest lhs - rhs of the slice bound over random smooth profiles.
inline CheckResult check_slice_bound(std::uint64_t seed, int n, int points) {
  Sampler s(seed);
  double worst = -INFINITY;
  for (int k = 0; k < n; ++k) {
    const double a1 = s.uniform(-2, 2);
    const double c0 = s.uniform(-1, 1), c1 = s.uniform(-3, 3), amp = s.uniform(0, 1), freq = s.uniform(0.5, 4);
    std::vector<double> w(static_cast<std::size_t>(points));
    for (int m = 0; m < points; ++m) {
      const double t = -0.5 + static_cast<double>(m) / (points - 1);
      w[m] = c0 + c1 * t + amp * std::sin(2 * std::numbers::pi * freq * t);
    }
    const SliceBound b = slice_energy_bound_check(a1, w);
    worst = std::max(worst, b.lhs - b.rhs);
  }
  return detail::finish("slice_bound", n, worst, 1e-3);
}

/// Unit square folded along y = 1/2: u = 1 - |2y - 1| / 2.
inline constexpr const char* kTentScene = R"({
  "domain": {"x0": 0, "y0": 0, "x1": 1, "y1": 1},
  "cells": [
    {"polygon": [[0, 0], [1, 0], [1, 0.5], [0, 0.5]], "coeffs": {"c01": 1}},
    {"polygon": [[0, 0.5], [1, 0.5], [1, 1], [0, 1]], "coeffs": {"c00": 1, "c01": -1}}
  ],
  "jumps": [
    {"p0": [0, 0.5], "p1": [1, 0.5], "nu": [0, 1]}
  ]
})";

inline CheckResult check_tent_limit() {
  const EnergyBreakdown e = limit_energy(parse_scene(kTentScene));
  const double err = std::max({std::fabs(e.total - std::numbers::pi), std::fabs(e.bulk), std::fabs(e.jump - e.total)});
  return detail::finish("tent_limit", 1, err, 1e-6);
}

/// Mollification of an affine field returns it, and the discrete kernel has unit mass.
inline CheckResult check_mollifier_affine() {
  const int n = 65;
  const double h = 1.0 / (n - 1);
  std::vector<double> vals(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) vals[static_cast<std::size_t>(j) * n + i] = 0.3 + 1.7 * i * h - 0.9 * j * h;
  const GridField f({0, 0}, h, n, n, vals);
  double worst = std::fabs(discrete_kernel(0.25, h).mass() - 1.0);
  for (double eps : {0.25, 0.0625}) {
    const GridField m = mollify(f, {eps});
    for (std::size_t k = 0; k < vals.size(); ++k) worst = std::max(worst, std::fabs(m.values()[k] - vals[k]));
  }
  return detail::finish("mollifier_affine", 2, worst, 1e-12);
}

/// The property suite run by the selftest command, in a fixed order.
inline std::vector<CheckResult> invariant_suite(std::uint64_t seed) {
  return {
      check_envelope_below_raw(seed, 100000),
      check_envelope_above_operator_norm(seed + 1, 100000),
      check_scaling_identity(seed + 2, 100000),
      check_branch_continuity(seed + 3, 10000),
      check_polyconvex_witness(seed + 4, 10000),
      check_polyconvex_midpoint(seed + 5, 10000),
      check_laminate_exactness(seed + 6, 10000),
      check_envelope_1d(),
      check_scaled_envelope_monotone(),
      check_jump_cost(seed + 7, 20, 256),
      check_slice_bound(seed + 8, 100, 1024),
      check_tent_limit(),
      check_mollifier_affine(),
  };
}

}  // namespace willmore

#endif  // WILLMORE_INVARIANTS_HPP
