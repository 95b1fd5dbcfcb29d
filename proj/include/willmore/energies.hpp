#ifndef WILLMORE_ENERGIES_HPP
#define WILLMORE_ENERGIES_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "willmore/errors.hpp"
#include "willmore/geometry.hpp"

namespace willmore {

/// Penalization strength lambda > 0 with its square root cached.
class Penalty {
 public:
  explicit Penalty(double lambda) : lambda_(lambda), sqrt_lambda_(std::sqrt(lambda)) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw ValidationError("lambda must be positive and finite, got " + std::to_string(lambda));
  }
  double lambda() const { return lambda_; }
  double sqrt_lambda() const { return sqrt_lambda_; }

 private:
  double lambda_;
  double sqrt_lambda_;
};

/// Relative threshold under which a shape operator counts as exactly zero.
inline constexpr double kFlatTolerance = 1e-14;

inline bool is_flat(const SymMat2& s, const SymMat2& xi) {
  return s.frobenius() <= kFlatTolerance * std::max(1.0, xi.frobenius());
}

/// Raw penalized density: zero on flat points, (|S|^2 + lambda)/sqrt(lambda) area-weighted elsewhere.
inline double f_raw(const Penalty& p, const Tilt& v, const SymMat2& xi) {
  const SymMat2 s = shape_operator(v, xi);
  if (is_flat(s, xi)) return 0.0;
  return (s.frobenius_sq() + p.lambda()) / p.sqrt_lambda() * area_factor(v);
}

/// Branch of g_lambda used when rho0 <= sqrt(lambda).
inline double g_lambda_lower(const Penalty& p, const SymMat2& xi) {
  return 2.0 * (rho0(xi) - std::fabs(xi.det()) / p.sqrt_lambda());
}

/// Branch of g_lambda used when rho0 > sqrt(lambda).
inline double g_lambda_upper(const Penalty& p, const SymMat2& xi) {
  return p.sqrt_lambda() + xi.frobenius_sq() / p.sqrt_lambda();
}

inline double g_lambda(const Penalty& p, const SymMat2& xi) {
  return rho0(xi) <= p.sqrt_lambda() ? g_lambda_lower(p, xi) : g_lambda_upper(p, xi);
}

/// Closed-form relaxed density g_lambda(S) times the area factor.
inline double h_lambda(const Penalty& p, const Tilt& v, const SymMat2& xi) {
  return g_lambda(p, shape_operator(v, xi)) * area_factor(v);
}

/// Bulk density of the limit functional.
inline double G_density(const Tilt& v, const SymMat2& xi) {
  return 2.0 * rho0(shape_operator(v, xi)) * area_factor(v);
}

/// Recession density with the operator norm in place of rho0.
inline double G_inf_density(const Tilt& v, const SymMat2& xi) {
  return 2.0 * op_norm(shape_operator(v, xi)) * area_factor(v);
}

/// Gradient jump across a line with unit normal nu, from slope a (minus side) to b (plus side).
struct JumpDatum {
  Tilt a;
  Tilt b;
  Vec2 nu{0.0, 1.0};

  void validate() const {
    if (std::fabs(norm(nu) - 1.0) > 1e-12) throw ValidationError("jump normal is not a unit vector");
    const Vec2 t = perp(nu);
    const double ta = dot(a.vec(), t);
    const double tb = dot(b.vec(), t);
    if (std::fabs(ta - tb) > 1e-9)
      throw ValidationError("jump datum has a tangential gradient jump of " + std::to_string(std::fabs(ta - tb)));
  }
};

/// Minimal transition cost of a gradient jump for the recession density.
inline double jump_cost(const JumpDatum& j) {
  j.validate();
  const double tangential = 0.5 * (dot(j.a.vec(), perp(j.nu)) + dot(j.b.vec(), perp(j.nu)));
  return 2.0 * std::sqrt(1.0 + tangential * tangential) * turning_angle(j.a, j.b);
}

/// One-dimensional raw density: zero at kappa = 0, lambda + kappa^2 otherwise.
inline double f1d_raw(const Penalty& p, double kappa) {
  return kappa == 0.0 ? 0.0 : p.lambda() + kappa * kappa;
}

/// Convex lower semicontinuous envelope of f1d_raw.
inline double envelope_1d(const Penalty& p, double kappa) {
  const double k = std::fabs(kappa);
  return k <= p.sqrt_lambda() ? 2.0 * p.sqrt_lambda() * k : p.lambda() + kappa * kappa;
}

namespace detail {
inline double theta(double t) { return t <= 1.0 ? 2.0 * t : 1.0 + t * t; }
}  // namespace detail

/// Convex function of (xi, A) whose restriction to A = det xi is g_1(S(v, xi)).
inline double polyconvex_H(const Tilt& v, const SymMat2& xi, double A) {
  const SymMat2 s = shape_operator(v, xi);
  const double fs = s.frobenius_sq();
  const double d = s.det();
  double plus = fs + 2.0 * d;
  double minus = fs - 2.0 * d;
  const double floor = -1e-12 * std::max(1.0, fs);
  if (plus < floor || minus < floor) throw std::logic_error("polyconvex_H: negative radicand");
  plus = std::max(plus, 0.0);
  minus = std::max(minus, 0.0);
  const double w = 1.0 + v.norm_sq();
  const double lin = 2.0 * A / (w * w);
  return std::max(detail::theta(std::sqrt(plus)) - lin, detail::theta(std::sqrt(minus)) + lin);
}

}  // namespace willmore

#endif  // WILLMORE_ENERGIES_HPP
