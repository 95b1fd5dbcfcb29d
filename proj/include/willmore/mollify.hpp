#ifndef WILLMORE_MOLLIFY_HPP
#define WILLMORE_MOLLIFY_HPP

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <vector>

#include <fftw3.h>

#include "willmore/energies.hpp"
#include "willmore/errors.hpp"
#include "willmore/grid.hpp"
#include "willmore/parallel.hpp"
#include "willmore/quadrature.hpp"

namespace willmore {

/// Radial bump exp(-1/(1 - r^2)) on the unit disc, scaled to radius epsilon and normalized to
/// unit mass on the sampling grid.
struct MollifierSpec {
  double epsilon;
};

/// Unnormalized kernel profile at squared radius r2.
inline double bump_profile(double r2) { return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0; }

/// sup of the unit-mass continuous kernel on the unit disc: e^{-1} over the disc integral of the
/// profile. This is the constant of the Hessian estimate |D^2 u_eps| <= C eps^-2 |D grad u|.
inline double kernel_sup_constant() {
  const GaussRule g = gauss_legendre(64);
  double mass = 0.0;
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    const double r = 0.5 * (g.nodes[k] + 1.0);
    mass += 0.5 * g.weights[k] * bump_profile(r * r) * r;
  }
  mass *= 2.0 * std::numbers::pi;
  return std::exp(-1.0) / mass;
}

/// Kernel samples on the (2R+1)^2 node stencil, R = floor(epsilon / h), normalized to sum 1.
struct DiscreteKernel {
  int radius;
  std::vector<double> weights;  ///< row-major, x fastest

  double at(int dx, int dy) const {
    const int w = 2 * radius + 1;
    return weights[static_cast<std::size_t>(dy + radius) * w + (dx + radius)];
  }
  double mass() const { return pairwise_sum(weights); }
};

inline DiscreteKernel discrete_kernel(double epsilon, double h) {
  const int R = static_cast<int>(std::floor(epsilon / h * (1.0 + 1e-12)));
  const int w = 2 * R + 1;
  DiscreteKernel k{R, std::vector<double>(static_cast<std::size_t>(w) * w)};
  for (int j = -R; j <= R; ++j)
    for (int i = -R; i <= R; ++i)
      k.weights[static_cast<std::size_t>(j + R) * w + (i + R)] = bump_profile((i * i + j * j) * h * h / (epsilon * epsilon));
  const double m = pairwise_sum(k.weights);
  for (double& x : k.weights) x /= m;
  return k;
}

namespace detail {

// The FFTW planner is not thread safe; execution on distinct arrays is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

inline int smooth_fft_size(int n) {
  for (int m = n;; ++m) {
    int r = m;
    for (int f : {2, 3, 5, 7})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

// Point reflection u(-s) = 2u(0) - u(s) past each end; affine data continue as the same plane.
inline double odd_extend(const std::vector<double>& u, int i) {
  const int n = static_cast<int>(u.size());
  if (i < 0) return 2.0 * u[0] - u[-i];
  if (i > n - 1) return 2.0 * u[n - 1] - u[2 * (n - 1) - i];
  return u[i];
}

}  // namespace detail

/// Convolution with the discrete kernel after extending the field past each edge by point
/// reflection over a width of R nodes. Constants and affine fields come back unchanged up to
/// rounding. The plane through three corners is removed first and added back afterwards.
inline GridField mollify(const GridField& f, const MollifierSpec& m) {
  const double h = f.spacing();
  if (!(m.epsilon >= 2.0 * h * (1.0 - 1e-12)))
    throw ValidationError("epsilon under-resolved by the grid: need epsilon >= 2 * spacing");
  const DiscreteKernel K = discrete_kernel(m.epsilon, h);
  const int R = K.radius;
  const int nx = f.nx(), ny = f.ny();
  if (R > nx - 1 || R > ny - 1) throw ValidationError("epsilon exceeds the grid extent");

  const double u00 = f(0, 0);
  const double ax = (f(nx - 1, 0) - u00) / f.width();
  const double ay = (f(0, ny - 1) - u00) / f.height();
  auto plane = [&](int i, int j) { return u00 + ax * (i * h) + ay * (j * h); };

  const int ex = nx + 2 * R, ey = ny + 2 * R;
  const int lx = detail::smooth_fft_size(ex), ly = detail::smooth_fft_size(ey);
  const int cx = lx / 2 + 1;
  const std::size_t nreal = static_cast<std::size_t>(lx) * ly, ncplx = static_cast<std::size_t>(cx) * ly;
  std::unique_ptr<double, detail::FftwFree> a(fftw_alloc_real(nreal)), b(fftw_alloc_real(nreal));
  std::unique_ptr<fftw_complex, detail::FftwFree> A(fftw_alloc_complex(ncplx)), B(fftw_alloc_complex(ncplx));
  if (!a || !b || !A || !B) throw std::bad_alloc();
  std::fill_n(a.get(), nreal, 0.0);
  std::fill_n(b.get(), nreal, 0.0);

  // Residual extended along x row by row, then along y column by column.
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(ny));
  for (int j = 0; j < ny; ++j) {
    std::vector<double> r(static_cast<std::size_t>(nx));
    for (int i = 0; i < nx; ++i) r[i] = f(i, j) - plane(i, j);
    rows[j].resize(static_cast<std::size_t>(ex));
    for (int i = -R; i < nx + R; ++i) rows[j][i + R] = detail::odd_extend(r, i);
  }
  std::vector<double> col(static_cast<std::size_t>(ny));
  for (int m2 = 0; m2 < ex; ++m2) {
    for (int j = 0; j < ny; ++j) col[j] = rows[j][m2];
    for (int k = -R; k < ny + R; ++k) a.get()[static_cast<std::size_t>(k + R) * lx + m2] = detail::odd_extend(col, k);
  }
  for (int dy = -R; dy <= R; ++dy)
    for (int dx = -R; dx <= R; ++dx)
      b.get()[static_cast<std::size_t>((dy + ly) % ly) * lx + (dx + lx) % lx] = K.at(dx, dy);

  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fwd = fftw_plan_dft_r2c_2d(ly, lx, a.get(), A.get(), FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_2d(ly, lx, A.get(), a.get(), FFTW_ESTIMATE);
  }
  fftw_execute_dft_r2c(fwd, a.get(), A.get());
  fftw_execute_dft_r2c(fwd, b.get(), B.get());
  for (std::size_t k = 0; k < ncplx; ++k) {
    const double re = A.get()[k][0] * B.get()[k][0] - A.get()[k][1] * B.get()[k][1];
    const double im = A.get()[k][0] * B.get()[k][1] + A.get()[k][1] * B.get()[k][0];
    A.get()[k][0] = re, A.get()[k][1] = im;
  }
  fftw_execute_dft_c2r(bwd, A.get(), a.get());
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }

  const double scale = 1.0 / static_cast<double>(nreal);
  std::vector<double> out(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      out[static_cast<std::size_t>(j) * nx + i] = plane(i, j) + a.get()[static_cast<std::size_t>(j + R) * lx + (i + R)] * scale;
  return GridField(f.origin(), h, nx, ny, std::move(out));
}

/// Dyadic ladder extent / 2, extent / 4, ... down to the last entry >= 2 * spacing, where extent
/// is the shorter side of the grid.
inline std::vector<double> dyadic_ladder(const GridField& f) {
  std::vector<double> ladder;
  for (double e = 0.5 * std::min(f.width(), f.height()); e >= 2.0 * f.spacing() * (1.0 - 1e-12); e *= 0.5)
    ladder.push_back(e);
  return ladder;
}

/// Mollifications of one field along a descending epsilon ladder, computed on demand and kept
/// for reuse across penalties.
class EpsilonLadder {
 public:
  EpsilonLadder(const GridField& f, std::vector<double> ladder) : f_(f), eps_(std::move(ladder)) {
    if (eps_.empty()) throw ValidationError("epsilon ladder is empty");
    for (std::size_t k = 0; k < eps_.size(); ++k) {
      if (!(eps_[k] >= 2.0 * f.spacing() * (1.0 - 1e-12)))
        throw ValidationError("epsilon ladder entry " + std::to_string(eps_[k]) + " is under-resolved by the grid");
      if (k > 0 && !(eps_[k] < eps_[k - 1])) throw ValidationError("epsilon ladder must be strictly descending");
    }
    fields_.resize(eps_.size());
    hess_.resize(eps_.size());
  }

  const std::vector<double>& epsilons() const { return eps_; }

  const GridField& mollified(std::size_t k) {
    if (!fields_[k]) fields_[k] = mollify(f_, {eps_[k]});
    return *fields_[k];
  }

  double max_hessian(std::size_t k) {
    if (!hess_[k]) hess_[k] = max_hessian_norm(mollified(k));
    return *hess_[k];
  }

  /// Index of the smallest epsilon whose mollified Hessian stays below sqrt(lambda)/2, scanning
  /// down the ladder until the bound first fails.
  std::size_t choose(const Penalty& p) {
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < eps_.size(); ++k) {
      if (max_hessian(k) < 0.5 * p.sqrt_lambda()) best = k;
      else break;
    }
    if (!best) throw NoAdmissibleEpsilon();
    return *best;
  }

 private:
  const GridField& f_;
  std::vector<double> eps_;
  std::vector<std::optional<GridField>> fields_;
  std::vector<std::optional<double>> hess_;
};

inline double choose_epsilon(const Penalty& p, const GridField& f, const std::vector<double>& ladder) {
  EpsilonLadder L(f, ladder);
  return L.epsilons()[L.choose(p)];
}

}  // namespace willmore

#endif  // WILLMORE_MOLLIFY_HPP
