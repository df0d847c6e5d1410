#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace gmmpf {

/// One node of a quadrature or cubature rule.
struct CubatureNode {
  Eigen::Vector2d point;
  double weight = 0.0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

/// Product rule for the disk of radius `radius` about `center` following
/// Lether's construction: with x = R u and y = R sqrt(1 - u^2) v the area
/// element becomes R^2 sqrt(1 - u^2) du dv, integrated by Gauss-Chebyshev
/// (second kind) in u and Gauss-Legendre in v. order^2 nodes, exact for
/// polynomials of total degree <= 2*order - 1.
std::vector<CubatureNode> disk_rule(const Eigen::Vector2d& center, double radius, int order);

/// Approximates the integral of f over the disk.
double disk_cubature(const std::function<double(const Eigen::Vector2d&)>& f,
                     const Eigen::Vector2d& center, double radius, int order = 8);

}  // namespace gmmpf
