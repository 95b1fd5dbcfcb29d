#ifndef WILLMORE_GEOMETRY_HPP
#define WILLMORE_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <utility>

namespace willmore {

/// Plain 2-vector used for directions, points and normals in the parameter plane.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
/// Rotation by +90 degrees: (x, y) -> (-y, x).
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

/// Symmetric 2x2 matrix stored by its three independent entries.
struct SymMat2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  static SymMat2 diag(double d1, double d2) { return {d1, 0.0, d2}; }
  /// n n^T
  static SymMat2 outer(Vec2 n) { return {n.x * n.x, n.x * n.y, n.y * n.y}; }

  double trace() const { return a11 + a22; }
  double det() const { return a11 * a22 - a12 * a12; }
  double frobenius_sq() const { return a11 * a11 + 2.0 * a12 * a12 + a22 * a22; }
  double frobenius() const { return std::sqrt(frobenius_sq()); }
  Vec2 apply(Vec2 w) const { return {a11 * w.x + a12 * w.y, a12 * w.x + a22 * w.y}; }
  /// w^T A w
  double quad(Vec2 w) const { return dot(w, apply(w)); }
};

inline SymMat2 operator+(const SymMat2& a, const SymMat2& b) {
  return {a.a11 + b.a11, a.a12 + b.a12, a.a22 + b.a22};
}
inline SymMat2 operator-(const SymMat2& a, const SymMat2& b) {
  return {a.a11 - b.a11, a.a12 - b.a12, a.a22 - b.a22};
}
inline SymMat2 operator*(double s, const SymMat2& a) { return {s * a.a11, s * a.a12, s * a.a22}; }

/// Gradient of a graph function, the slope vector v.
struct Tilt {
  double v1 = 0.0;
  double v2 = 0.0;

  Vec2 vec() const { return {v1, v2}; }
  double norm_sq() const { return v1 * v1 + v2 * v2; }
  static Tilt of(Vec2 w) { return {w.x, w.y}; }
};

struct UnitNormal3 {
  double n1 = 0.0;
  double n2 = 0.0;
  double n3 = -1.0;
};

struct Eigenvalues {
  double tau1;  ///< larger eigenvalue
  double tau2;
};

namespace detail {
// Half the eigenvalue gap, |(a11 - a22)/2, a12|.
inline double half_gap(const SymMat2& m) { return std::hypot(0.5 * (m.a11 - m.a22), m.a12); }
}  // namespace detail

inline Eigenvalues eig_sym2(const SymMat2& m) {
  const double mid = 0.5 * m.trace();
  const double r = detail::half_gap(m);
  const double big = mid >= 0.0 ? mid + r : mid - r;
  if (big == 0.0) return {0.0, 0.0};
  // The small eigenvalue from det/big keeps relative accuracy when |mid| ~ r.
  const double small = m.det() / big;
  return mid >= 0.0 ? Eigenvalues{big, small} : Eigenvalues{small, big};
}

/// Unit eigenvector belonging to the larger eigenvalue tau1. The other one is its perp.
inline Vec2 eigvec_major(const SymMat2& m) {
  const double angle = 0.5 * std::atan2(2.0 * m.a12, m.a11 - m.a22);
  return {std::cos(angle), std::sin(angle)};
}

/// Sum of absolute eigenvalues. Equals max(|trace|, 2r), which avoids cancellation.
inline double rho0(const SymMat2& m) {
  return std::max(std::fabs(m.trace()), 2.0 * detail::half_gap(m));
}

/// Largest absolute eigenvalue.
inline double op_norm(const SymMat2& m) {
  return std::fabs(0.5 * m.trace()) + detail::half_gap(m);
}

inline double area_factor(const Tilt& v) { return std::sqrt(1.0 + v.norm_sq()); }

inline UnitNormal3 normal(const Tilt& v) {
  const double s = 1.0 / area_factor(v);
  return {v.v1 * s, v.v2 * s, -s};
}

/// First fundamental form g = I + v v^T.
inline SymMat2 metric(const Tilt& v) {
  return {1.0 + v.v1 * v.v1, v.v1 * v.v2, 1.0 + v.v2 * v.v2};
}

namespace detail {
// g^{s} = I + c v v^T, with c = ((1+q)^{s} - 1)/q written without the 0/0 at q = 0.
inline SymMat2 metric_root(const Tilt& v, bool inverse) {
  const double q = v.norm_sq();
  const double w = std::sqrt(1.0 + q);
  const double c = inverse ? -1.0 / (w * (1.0 + w)) : 1.0 / (1.0 + w);
  return {1.0 + c * v.v1 * v.v1, c * v.v1 * v.v2, 1.0 + c * v.v2 * v.v2};
}

// B A B for symmetric A, B.
inline SymMat2 congruence(const SymMat2& b, const SymMat2& a) {
  const double p11 = b.a11 * a.a11 + b.a12 * a.a12;
  const double p12 = b.a11 * a.a12 + b.a12 * a.a22;
  const double p21 = b.a12 * a.a11 + b.a22 * a.a12;
  const double p22 = b.a12 * a.a12 + b.a22 * a.a22;
  return {p11 * b.a11 + p12 * b.a12, 0.5 * ((p11 * b.a12 + p12 * b.a22) + (p21 * b.a11 + p22 * b.a12)),
          p21 * b.a12 + p22 * b.a22};
}
}  // namespace detail

/// g^{-1/2}
inline SymMat2 metric_inv_sqrt(const Tilt& v) { return detail::metric_root(v, true); }
/// g^{1/2}
inline SymMat2 metric_sqrt(const Tilt& v) { return detail::metric_root(v, false); }

/// Second fundamental form of the graph with slope v and Hessian xi.
inline SymMat2 second_fundamental_form(const Tilt& v, const SymMat2& xi) {
  return (1.0 / area_factor(v)) * xi;
}

/// S(v, xi) = g^{-1/2} II g^{-1/2}. At v = 0 this returns xi unchanged.
inline SymMat2 shape_operator(const Tilt& v, const SymMat2& xi) {
  if (v.v1 == 0.0 && v.v2 == 0.0) return xi;
  return detail::congruence(metric_inv_sqrt(v), second_fundamental_form(v, xi));
}

/// Inverse of xi -> S(v, xi).
inline SymMat2 hessian_from_shape(const Tilt& v, const SymMat2& s) {
  if (v.v1 == 0.0 && v.v2 == 0.0) return s;
  return area_factor(v) * detail::congruence(metric_sqrt(v), s);
}

/// Angle between the graph normals at slopes a and b, in [0, pi].
/// arccos of the clamped dot product, evaluated as atan2(|cross|, dot) so small angles keep full accuracy.
inline double turning_angle(const Tilt& a, const Tilt& b) {
  const UnitNormal3 na = normal(a);
  const UnitNormal3 nb = normal(b);
  const double c = std::clamp(na.n1 * nb.n1 + na.n2 * nb.n2 + na.n3 * nb.n3, -1.0, 1.0);
  const double x1 = na.n2 * nb.n3 - na.n3 * nb.n2;
  const double x2 = na.n3 * nb.n1 - na.n1 * nb.n3;
  const double x3 = na.n1 * nb.n2 - na.n2 * nb.n1;
  return std::atan2(std::sqrt(x1 * x1 + x2 * x2 + x3 * x3), c);
}

}  // namespace willmore

#endif  // WILLMORE_GEOMETRY_HPP
