#ifndef WILLMORE_QUADRATURE_HPP
#define WILLMORE_QUADRATURE_HPP

#include <cmath>
#include <numbers>
#include <vector>

namespace willmore {

struct GaussRule {
  std::vector<double> nodes;    ///< on [-1, 1]
  std::vector<double> weights;  ///< sum to 2
};

/// Gauss-Legendre rule with n points, exact for polynomials of degree 2n - 1.
inline GaussRule gauss_legendre(int n) {
  GaussRule r{std::vector<double>(n), std::vector<double>(n)};
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int m = 2; m <= n; ++m) {
        const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    r.nodes[k] = -x;
    r.nodes[n - 1 - k] = x;
    r.weights[k] = r.weights[n - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace willmore

#endif  // WILLMORE_QUADRATURE_HPP
