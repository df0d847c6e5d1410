#include "gmmpf/cubature.hpp"

#include <cmath>

#include "gmmpf/types.hpp"

namespace gmmpf {

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw DomainError("quadrature order must be >= 1");
  const auto n = static_cast<std::size_t>(order);
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // Newton iteration on P_n from the Chebyshev initial guess; roots are
  // symmetric so only half are computed.
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t j = 2; j <= n; ++j) {
        const double jd = static_cast<double>(j);
        const double p2 = ((2.0 * jd - 1.0) * x * p1 - (jd - 1.0) * p0) / jd;
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_n(x), p0 = P_{n-1}(x)
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (n == 1) {
      x = 0.0;
      dp = 1.0;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

std::vector<CubatureNode> disk_rule(const Eigen::Vector2d& center, double radius, int order) {
  if (!(radius > 0.0)) throw DomainError("disk radius must be positive");
  if (order < 1) throw DomainError("cubature order must be >= 1");
  std::vector<double> v, wv;
  gauss_legendre(order, v, wv);

  std::vector<CubatureNode> rule;
  rule.reserve(static_cast<std::size_t>(order) * static_cast<std::size_t>(order));
  const double h = kPi / (order + 1.0);
  for (int i = 1; i <= order; ++i) {
    const double u = std::cos(i * h);
    const double s = std::sin(i * h);
    // Gauss-Chebyshev of the second kind integrates against sqrt(1 - u^2).
    const double wu = h * s * s;
    for (std::size_t j = 0; j < v.size(); ++j) {
      const Eigen::Vector2d p(radius * u, radius * s * v[j]);
      rule.push_back({center + p, radius * radius * wu * wv[j]});
    }
  }
  return rule;
}

double disk_cubature(const std::function<double(const Eigen::Vector2d&)>& f,
                     const Eigen::Vector2d& center, double radius, int order) {
  double total = 0.0;
  for (const auto& node : disk_rule(center, radius, order)) total += node.weight * f(node.point);
  return total;
}

}  // namespace gmmpf
