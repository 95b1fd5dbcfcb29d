#ifndef WILLMORE_GRID_HPP
#define WILLMORE_GRID_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "willmore/energies.hpp"
#include "willmore/errors.hpp"
#include "willmore/geometry.hpp"
#include "willmore/parallel.hpp"

namespace willmore {

/// Row-major node array; index (i, j) with i along x and j along y.
template <class T>
struct NodeField {
  int nx = 0;
  int ny = 0;
  std::vector<T> data;

  NodeField() = default;
  NodeField(int nx_, int ny_) : nx(nx_), ny(ny_), data(static_cast<std::size_t>(nx_) * ny_) {}
  T& at(int i, int j) { return data[static_cast<std::size_t>(j) * nx + i]; }
  const T& at(int i, int j) const { return data[static_cast<std::size_t>(j) * nx + i]; }
};

/// Samples of a scalar field on a uniform grid with equal spacing in both axes.
class GridField {
 public:
  static constexpr int kMinNodes = 5;

  GridField(Vec2 origin, double h, int nx, int ny, std::vector<double> values)
      : origin_(origin), h_(h), values_(nx, ny) {
    if (nx < kMinNodes || ny < kMinNodes)
      throw ValidationError("grid too small: need at least 5 nodes per axis, got " + std::to_string(nx) + "x" +
                            std::to_string(ny));
    if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("grid spacing must be positive");
    if (values.size() != values_.data.size()) throw ValidationError("grid value count does not match nx*ny");
    for (double x : values)
      if (!std::isfinite(x)) throw ValidationError("grid values must be finite");
    values_.data = std::move(values);
  }

  template <class Fn>
  static GridField sample(Vec2 origin, double h, int nx, int ny, Fn&& fn) {
    if (nx < kMinNodes || ny < kMinNodes) throw ValidationError("grid too small");
    std::vector<double> vals(static_cast<std::size_t>(nx) * ny);
    parallel_for(static_cast<std::size_t>(ny), [&](std::size_t j) {
      for (int i = 0; i < nx; ++i)
        vals[j * nx + i] = fn(Vec2{origin.x + i * h, origin.y + static_cast<double>(j) * h});
    });
    return GridField(origin, h, nx, ny, std::move(vals));
  }

  Vec2 origin() const { return origin_; }
  double spacing() const { return h_; }
  int nx() const { return values_.nx; }
  int ny() const { return values_.ny; }
  double operator()(int i, int j) const { return values_.at(i, j); }
  const std::vector<double>& values() const { return values_.data; }
  Vec2 point(int i, int j) const { return {origin_.x + i * h_, origin_.y + j * h_}; }
  double width() const { return (nx() - 1) * h_; }
  double height() const { return (ny() - 1) * h_; }
  double area() const { return width() * height(); }
  double max_abs() const {
    double m = 0.0;
    for (double x : values_.data) m = std::max(m, std::fabs(x));
    return m;
  }

 private:
  Vec2 origin_;
  double h_;
  NodeField<double> values_;
};

namespace detail {

// First derivative along a line of n samples, second order everywhere.
template <class Get>
double diff1(Get&& u, int i, int n, double h) {
  if (i == 0) return (-3.0 * u(0) + 4.0 * u(1) - u(2)) / (2.0 * h);
  if (i == n - 1) return (3.0 * u(n - 1) - 4.0 * u(n - 2) + u(n - 3)) / (2.0 * h);
  return (u(i + 1) - u(i - 1)) / (2.0 * h);
}

// Second derivative along a line, second order everywhere.
template <class Get>
double diff2(Get&& u, int i, int n, double h) {
  const double h2 = h * h;
  if (i == 0) return (2.0 * u(0) - 5.0 * u(1) + 4.0 * u(2) - u(3)) / h2;
  if (i == n - 1) return (2.0 * u(n - 1) - 5.0 * u(n - 2) + 4.0 * u(n - 3) - u(n - 4)) / h2;
  return (u(i + 1) - 2.0 * u(i) + u(i - 1)) / h2;
}

inline NodeField<double> partial(const NodeField<double>& u, double h, bool along_x) {
  NodeField<double> out(u.nx, u.ny);
  parallel_for(static_cast<std::size_t>(u.ny), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < u.nx; ++i) {
      out.at(i, j) = along_x ? diff1([&](int k) { return u.at(k, j); }, i, u.nx, h)
                             : diff1([&](int k) { return u.at(i, k); }, j, u.ny, h);
    }
  });
  return out;
}

inline NodeField<double> as_nodes(const GridField& f) {
  NodeField<double> u(f.nx(), f.ny());
  u.data = f.values();
  return u;
}

}  // namespace detail

inline NodeField<Vec2> fd_gradient(const GridField& f) {
  const NodeField<double> u = detail::as_nodes(f);
  const NodeField<double> gx = detail::partial(u, f.spacing(), true);
  const NodeField<double> gy = detail::partial(u, f.spacing(), false);
  NodeField<Vec2> g(f.nx(), f.ny());
  for (std::size_t k = 0; k < g.data.size(); ++k) g.data[k] = {gx.data[k], gy.data[k]};
  return g;
}

/// Finite-difference Hessian; the mixed entry averages d_x(d_y u) and d_y(d_x u).
inline NodeField<SymMat2> fd_hessian(const GridField& f) {
  const double h = f.spacing();
  const NodeField<double> u = detail::as_nodes(f);
  const NodeField<double> gx = detail::partial(u, h, true);
  const NodeField<double> gy = detail::partial(u, h, false);
  const NodeField<double> gxy = detail::partial(gx, h, false);
  const NodeField<double> gyx = detail::partial(gy, h, true);
  NodeField<SymMat2> H(f.nx(), f.ny());
  parallel_for(static_cast<std::size_t>(f.ny()), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < f.nx(); ++i) {
      const double uxx = detail::diff2([&](int k) { return u.at(k, j); }, i, f.nx(), h);
      const double uyy = detail::diff2([&](int k) { return u.at(i, k); }, j, f.ny(), h);
      H.at(i, j) = {uxx, 0.5 * (gxy.at(i, j) + gyx.at(i, j)), uyy};
    }
  });
  return H;
}

/// Size below which a finite-difference Hessian entry is indistinguishable from rounding of the samples.
/// Second differences of exactly affine data are not exactly zero in floating point, and the raw
/// density jumps at zero curvature, so entries under this floor are treated as zero.
inline double roundoff_floor(const GridField& f) {
  constexpr double kUlps = 4096.0;
  const double h = f.spacing();
  return kUlps * std::numeric_limits<double>::epsilon() * std::max(1.0, f.max_abs()) / (h * h);
}

inline SymMat2 snap(const SymMat2& m, double floor) {
  auto z = [floor](double x) { return std::fabs(x) <= floor ? 0.0 : x; };
  return {z(m.a11), z(m.a12), z(m.a22)};
}

/// Dual-cell quadrature of node values over the grid rectangle: weight h^2 inside, halved on
/// edges, quartered at corners. Rows are summed pairwise, then the row totals, so the result
/// does not depend on the thread count.
template <class Value>
double integrate_nodes(int nx, int ny, double h, Value&& value) {
  std::vector<double> rows(static_cast<std::size_t>(ny));
  parallel_for(static_cast<std::size_t>(ny), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    std::vector<double> row(static_cast<std::size_t>(nx));
    for (int i = 0; i < nx; ++i) {
      const double w = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
      row[i] = w * value(i, j);
    }
    const double wj = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
    rows[jj] = wj * pairwise_sum(row);
  });
  return pairwise_sum(rows) * h * h;
}

/// Integral of density(grad u, hess u) over the grid rectangle.
template <class Density>
double integrate_density(const GridField& f, Density&& density) {
  const NodeField<Vec2> g = fd_gradient(f);
  const NodeField<SymMat2> H = fd_hessian(f);
  const double floor = roundoff_floor(f);
  return integrate_nodes(f.nx(), f.ny(), f.spacing(), [&](int i, int j) {
    return density(Tilt::of(g.at(i, j)), snap(H.at(i, j), floor));
  });
}

inline double energy_F_lambda(const GridField& f, const Penalty& p) {
  return integrate_density(f, [&](const Tilt& v, const SymMat2& xi) { return f_raw(p, v, xi); });
}

inline double energy_h_lambda(const GridField& f, const Penalty& p) {
  return integrate_density(f, [&](const Tilt& v, const SymMat2& xi) { return h_lambda(p, v, xi); });
}

inline double energy_G(const GridField& f) {
  return integrate_density(f, [](const Tilt& v, const SymMat2& xi) { return G_density(v, xi); });
}

/// Largest node Frobenius norm of the finite-difference Hessian.
inline double max_hessian_norm(const GridField& f) {
  const NodeField<SymMat2> H = fd_hessian(f);
  double m = 0.0;
  for (const SymMat2& x : H.data) m = std::max(m, x.frobenius());
  return m;
}

}  // namespace willmore

#endif  // WILLMORE_GRID_HPP
