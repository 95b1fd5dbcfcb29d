#ifndef WILLMORE_LAMINATE_HPP
#define WILLMORE_LAMINATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "willmore/energies.hpp"
#include "willmore/errors.hpp"
#include "willmore/geometry.hpp"
#include "willmore/grid.hpp"
#include "willmore/parallel.hpp"

namespace willmore {

/// Order-two laminate reaching the relaxed density: phases S1 = 0, S2 along the small-curvature
/// direction, S3 with full curvature in the other direction.
struct LaminateSpec {
  Tilt v;
  double lambda = 1.0;
  Vec2 e1, e2;          ///< eigenframe of S(v, xi); e1 belongs to x
  double x = 0.0;       ///< eigenvalue of smaller magnitude
  double y = 0.0;
  double alpha = 1.0;   ///< weight of S2 inside the inner mixture
  double beta = 1.0;    ///< weight of S3
  bool single_level = false;  ///< x = 0: only S3 and the flat phase
  SymMat2 S1, S2, S3;
  SymMat2 xi1, xi2, xi3;
  SymMat2 target_S, target_xi;
  double predicted_value = 0.0;  ///< weighted f_raw of the phases divided by the area factor

  /// Weighted f_raw of the phases; compare with cell averages of f_raw at the frozen tilt.
  double predicted_energy() const { return predicted_value * area_factor(v); }

  /// Largest violation of the mixture identities in S and in xi (barycentre and rank-one links).
  double mixture_defect() const {
    auto worst = [](const SymMat2& a, const SymMat2& b) {
      return std::max({std::fabs(a.a11 - b.a11), std::fabs(a.a12 - b.a12), std::fabs(a.a22 - b.a22)});
    };
    auto rank_one = [](const SymMat2& d) { return std::fabs(d.det()) / std::max(1.0, d.frobenius_sq()); };
    const SymMat2 inner = alpha * S2 + (1.0 - alpha) * S1;
    const SymMat2 inner_xi = alpha * xi2 + (1.0 - alpha) * xi1;
    return std::max({worst(beta * S3 + (1.0 - beta) * inner, target_S), rank_one(S3 - inner), rank_one(S2 - S1),
                     worst(beta * xi3 + (1.0 - beta) * inner_xi, target_xi) / std::max(1.0, target_xi.frobenius()),
                     rank_one(xi3 - inner_xi), rank_one(xi2 - xi1)});
  }
};

inline LaminateSpec build_laminate(const Penalty& p, const Tilt& v, const SymMat2& xi) {
  const SymMat2 S = shape_operator(v, xi);
  if (is_flat(S, xi)) throw NotAdmissible(NotAdmissible::Reason::kAlreadyFlat);
  if (!(rho0(S) < p.sqrt_lambda())) throw NotAdmissible(NotAdmissible::Reason::kEnvelopeEqualsRaw);

  LaminateSpec L;
  L.v = v;
  L.lambda = p.lambda();
  L.target_S = S;
  L.target_xi = xi;
  const Eigenvalues ev = eig_sym2(S);
  const Vec2 major = eigvec_major(S);
  if (std::fabs(ev.tau1) <= std::fabs(ev.tau2)) {
    L.x = ev.tau1, L.y = ev.tau2, L.e1 = major, L.e2 = perp(major);
  } else {
    L.x = ev.tau2, L.y = ev.tau1, L.e1 = perp(major), L.e2 = major;
  }
  const double sl = p.sqrt_lambda();
  const SymMat2 P1 = SymMat2::outer(L.e1), P2 = SymMat2::outer(L.e2);
  if (std::fabs(L.x) <= 1e-12 * std::fabs(L.y)) {
    L.single_level = true;
    L.x = 0.0;
    L.alpha = 1.0;
    L.beta = std::fabs(L.y) / sl;
    L.S3 = (L.y / L.beta) * P2;
  } else {
    L.alpha = std::fabs(L.x) / sl;
    L.beta = std::fabs(L.y) / (sl - std::fabs(L.x));
    L.S2 = (L.x / L.alpha) * P1;
    L.S3 = L.x * P1 + (L.y / L.beta) * P2;
  }
  L.xi1 = hessian_from_shape(v, L.S1);
  L.xi2 = hessian_from_shape(v, L.S2);
  L.xi3 = hessian_from_shape(v, L.S3);
  const double af = area_factor(v);
  L.predicted_value = (L.beta * f_raw(p, v, L.xi3) +
                       (1.0 - L.beta) * (L.alpha * f_raw(p, v, L.xi2) + (1.0 - L.alpha) * f_raw(p, v, L.xi1))) /
                      af;
  return L;
}

struct OracleConfig {
  int refinement = 64;  ///< inner laminate periods per unit cell
  int multistarts = 8;
  double tolerance = 1e-9;
  std::uint64_t seed = 1;

  void validate() const {
    if (refinement < 4) throw ValidationError("refinement must be at least 4");
    if (multistarts < 1) throw ValidationError("multistarts must be at least 1");
    if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
  }
};

/// Grid cells across one inner laminate period.
inline constexpr int kCellsPerInnerPeriod = 16;

namespace detail {

// C^1 periodic profile with P'' = 1 - f on a fraction f of each period and -f elsewhere;
// P' has zero mean, P(start) = 0.
struct LayerProfile {
  double fraction;
  double period;
  double start;

  double reduce(double s) const {
    const double r = s - start;
    return r - period * std::floor(r / period);
  }
  double value(double s) const { return eval(reduce(s), 0); }
  double d1(double s) const { return eval(reduce(s), 1); }
  double d2(double s) const { return reduce(s) < fraction * period ? 1.0 - fraction : -fraction; }

 private:
  double eval(double r, int order) const {
    const double f = fraction, l = period;
    const double d0 = -0.5 * f * (1.0 - f) * l;
    const double a = f * l;
    if (r < a) return order == 0 ? d0 * r + 0.5 * (1.0 - f) * r * r : d0 + (1.0 - f) * r;
    const double pa = d0 * a + 0.5 * (1.0 - f) * a * a;
    const double da = d0 + (1.0 - f) * a;
    const double q = r - a;
    return order == 0 ? pa + da * q - 0.5 * f * q * q : da - f * q;
  }
};

inline double smoothstep5(double r) {
  r = std::clamp(r, 0.0, 1.0);
  return r * r * r * (10.0 + r * (-15.0 + 6.0 * r));
}
inline double smoothstep5_d1(double r) {
  if (r <= 0.0 || r >= 1.0) return 0.0;
  return 30.0 * r * r * (1.0 - r) * (1.0 - r);
}
inline double smoothstep5_d2(double r) {
  if (r <= 0.0 || r >= 1.0) return 0.0;
  return 60.0 * r * (1.0 - r) * (1.0 - 2.0 * r);
}

inline bool axis_aligned(Vec2 n) { return std::fabs(n.x) >= 1.0 - 1e-12 || std::fabs(n.y) >= 1.0 - 1e-12; }

inline Vec2 snap_axis(Vec2 n) {
  if (std::fabs(n.x) >= 1.0 - 1e-12) return {n.x > 0 ? 1.0 : -1.0, 0.0};
  return {0.0, n.y > 0 ? 1.0 : -1.0};
}

}  // namespace detail

/// Periodic perturbation potential whose Hessian, added to the target xi, takes the laminate
/// phases in bands. Outer layers have period 1 along n2; the inner laminate has `inner_periods`
/// periods per unit along n1 and is switched off inside the S3 bands by a quintic cutoff one
/// inner period wide.
class LaminatePotential {
 public:
  LaminatePotential(const LaminateSpec& L, int inner_periods, int cells_per_period = kCellsPerInnerPeriod)
      : xi_(L.target_xi), single_(L.single_level) {
    const SymMat2 G = metric_sqrt(L.v);
    const Vec2 g2 = G.apply(L.e2);
    const Vec2 g1 = G.apply(L.e1);
    n2_ = (1.0 / norm(g2)) * g2;
    n1_ = (1.0 / norm(g1)) * g1;
    // Rank-one amplitudes: xi3 - xibar12 = c2 n2 n2^T, xi2 - xi1 = c1 n1 n1^T.
    const SymMat2 inner = L.alpha * L.xi2 + (1.0 - L.alpha) * L.xi1;
    double c2 = (L.xi3 - inner).quad(n2_);
    double c1 = single_ ? 0.0 : (L.xi2 - L.xi1).quad(n1_);

    aligned_ = detail::axis_aligned(n2_) && (single_ || detail::axis_aligned(n1_));
    const int cells = inner_periods * cells_per_period;
    h_ = 1.0 / cells;
    inner_period_ = 1.0 / inner_periods;
    double beta = L.beta, alpha = L.alpha;
    double s0 = 0.0;
    if (aligned_) {
      n2_ = detail::snap_axis(n2_);
      if (!single_) n1_ = detail::snap_axis(n1_);
      beta = std::round(L.beta * cells) / cells;
      if (!single_) alpha = std::round(L.alpha * cells_per_period) / cells_per_period;
      s0 = std::round(0.5 * (1.0 - beta) * cells) / cells;
    }
    auto too_thin = [](double frac, double cells_across) { return frac * cells_across < 3.0 || (1.0 - frac) * cells_across < 3.0; };
    if (too_thin(L.beta, cells) || (!single_ && too_thin(L.alpha, cells_per_period)))
      throw ValidationError("refinement too small to separate scales: a laminate band is thinner than 3 grid cells");
    zone_ = inner_period_;
    if (!single_ && 1.0 - beta < 2.0 * zone_)
      throw ValidationError("refinement too small to separate scales: cutoff zones do not fit in the inner band");
    // Keep the flat phase exactly flat with the rounded fractions.
    c2 *= L.beta / beta;
    c1 *= single_ ? 0.0 : L.alpha / alpha;
    c1_ = c1, c2_ = c2;
    alpha_ = alpha, beta_ = beta;
    outer_ = {beta, 1.0, s0};
    inner_ = {alpha, inner_period_, 0.0};
  }

  double operator()(Vec2 y) const {
    const double s = dot(y, n2_);
    double phi = c2_ * outer_.value(s);
    if (!single_) phi += c1_ * cutoff(s, 0) * inner_.value(dot(y, n1_));
    return phi;
  }

  /// Analytic Hessian of the perturbation.
  SymMat2 hessian(Vec2 y) const {
    const double s = dot(y, n2_);
    SymMat2 H = (c2_ * outer_.d2(s)) * SymMat2::outer(n2_);
    if (single_) return H;
    const double t = dot(y, n1_);
    const double z = cutoff(s, 0), dz = cutoff(s, 1), ddz = cutoff(s, 2);
    const SymMat2 cross{2.0 * n1_.x * n2_.x, n1_.x * n2_.y + n1_.y * n2_.x, 2.0 * n1_.y * n2_.y};
    return H + c1_ * ((z * inner_.d2(t)) * SymMat2::outer(n1_) + (dz * inner_.d1(t)) * cross +
                      (ddz * inner_.value(t)) * SymMat2::outer(n2_));
  }

  /// Analytic gradient of the perturbation.
  Vec2 gradient(Vec2 y) const {
    const double s = dot(y, n2_);
    Vec2 g = (c2_ * outer_.d1(s)) * n2_;
    if (single_) return g;
    const double t = dot(y, n1_);
    return g + c1_ * ((cutoff(s, 0) * inner_.d1(t)) * n1_ + (cutoff(s, 1) * inner_.value(t)) * n2_);
  }

  bool aligned() const { return aligned_; }
  double realized_alpha() const { return alpha_; }
  double realized_beta() const { return beta_; }
  double grid_spacing() const { return h_; }
  const SymMat2& target_xi() const { return xi_; }

 private:
  // Cutoff of the inner laminate: 0 in the S3 band, 1 in the middle of the other band.
  double cutoff(double s, int order) const {
    const double r = outer_.reduce(s);
    const double b = beta_;
    if (r < b) return 0.0;
    const double d = zone_;
    if (r < b + d) {
      const double q = (r - b) / d;
      return order == 0 ? detail::smoothstep5(q) : order == 1 ? detail::smoothstep5_d1(q) / d : detail::smoothstep5_d2(q) / (d * d);
    }
    if (r > 1.0 - d) {
      const double q = (1.0 - r) / d;
      return order == 0 ? detail::smoothstep5(q) : order == 1 ? -detail::smoothstep5_d1(q) / d : detail::smoothstep5_d2(q) / (d * d);
    }
    return order == 0 ? 1.0 : 0.0;
  }

  SymMat2 xi_;
  bool single_;
  bool aligned_ = false;
  Vec2 n1_, n2_;
  double c1_ = 0.0, c2_ = 0.0;
  double alpha_ = 1.0, beta_ = 1.0;
  double h_ = 0.0, inner_period_ = 0.0, zone_ = 0.0;
  detail::LayerProfile outer_{1.0, 1.0, 0.0};
  detail::LayerProfile inner_{1.0, 1.0, 0.0};
};

/// Dual-cell integral of density(i, j, grad, hess) over an n x n node block starting at origin,
/// with gradient and Hessian from central differences of `potential` (sampled one node beyond the
/// block). Rows are streamed, so the field is never stored.
template <class Potential, class Density>
double integrate_streamed(Potential&& potential, Vec2 origin, double h, int n, Density&& density) {
  std::vector<double> rows(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    std::vector<double> band[3];
    for (int r = 0; r < 3; ++r) {
      band[r].resize(static_cast<std::size_t>(n) + 2);
      for (int i = -1; i <= n; ++i)
        band[r][i + 1] = potential(Vec2{origin.x + i * h, origin.y + (j - 1 + r) * h});
    }
    std::vector<double> vals(static_cast<std::size_t>(n));
    const double h2 = h * h;
    for (int i = 0; i < n; ++i) {
      const int c = i + 1;
      const double u = band[1][c];
      const Vec2 g{(band[1][c + 1] - band[1][c - 1]) / (2.0 * h), (band[2][c] - band[0][c]) / (2.0 * h)};
      const SymMat2 H{(band[1][c + 1] - 2.0 * u + band[1][c - 1]) / h2,
                      (band[2][c + 1] - band[2][c - 1] - band[0][c + 1] + band[0][c - 1]) / (4.0 * h2),
                      (band[2][c] - 2.0 * u + band[0][c]) / h2};
      const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      vals[i] = w * density(i, j, g, H);
    }
    rows[jj] = ((j == 0 || j == n - 1) ? 0.5 : 1.0) * pairwise_sum(vals);
  });
  return pairwise_sum(rows) * h * h;
}

struct RealizedLaminate {
  GridField potential;          ///< quadratic part plus laminate perturbation on the unit cell
  double measured_avg_f_raw;    ///< cell average of f_raw at the frozen tilt
  double realized_alpha;
  double realized_beta;
};

/// Samples the laminate on the unit cell with kCellsPerInnerPeriod cells per inner period and
/// measures the average of f_raw(v, Hessian) with the tilt frozen at the laminate's v.
inline RealizedLaminate realize_laminate(const LaminateSpec& spec, const OracleConfig& cfg) {
  cfg.validate();
  const LaminatePotential phi(spec, cfg.refinement);
  const Penalty p(spec.lambda);
  const SymMat2 xi = spec.target_xi;
  const Vec2 centre{0.5, 0.5};
  auto w = [&](Vec2 y) {
    const Vec2 d = y - centre;
    return 0.5 * xi.quad(d) + phi(y);
  };
  const double h = phi.grid_spacing();
  const int n = static_cast<int>(std::lround(1.0 / h)) + 1;
  GridField field = GridField::sample({0.0, 0.0}, h, n, n, w);
  const double wmax = field.max_abs();
  const double floor = 4096.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, wmax) / (h * h);
  const double total = integrate_streamed(w, {0.0, 0.0}, h, n, [&](int, int, Vec2, const SymMat2& H) {
    return f_raw(p, spec.v, snap(H, floor));
  });
  return {std::move(field), total, phi.realized_alpha(), phi.realized_beta()};
}

}  // namespace willmore

#endif  // WILLMORE_LAMINATE_HPP
