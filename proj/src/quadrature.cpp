#include "dyson/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "dyson/numeric.hpp"

namespace dyson::quadrature {

namespace {
constexpr double kNewtonEps = 1e-14;
constexpr int kNewtonMaxIt = 100;
}  // namespace

// Physicists' Gauss-Hermite nodes by Newton iteration on the orthonormal
// recurrence, then rescaled to the probabilist's convention
// (node *= sqrt(2), weight /= sqrt(pi)).
GaussRule gauss_hermite_probabilist(std::size_t order) {
  if (order == 0) throw std::invalid_argument("gauss_hermite: order must be positive");
  const std::size_t n = order;
  GaussRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);

  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const std::size_t m = (n + 1) / 2;
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }
    double pp = 0.0;
    int it = 0;
    for (; it < kNewtonMaxIt; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(j / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= kNewtonEps) break;
    }
    if (it >= kNewtonMaxIt)
      throw std::runtime_error("gauss_hermite: Newton iteration did not converge");
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }

  const double sqrt2 = std::sqrt(2.0);
  const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] *= sqrt2;
    rule.weights[i] *= inv_sqrt_pi;
  }
  // Nodes come out descending from the recurrence; flip to ascending.
  for (std::size_t i = 0, j = n - 1; i < j; ++i, --j) {
    std::swap(rule.nodes[i], rule.nodes[j]);
    std::swap(rule.weights[i], rule.weights[j]);
  }
  return rule;
}

GaussRule gauss_legendre(double a, double b, std::size_t order) {
  if (order == 0) throw std::invalid_argument("gauss_legendre: order must be positive");
  const std::size_t n = order;
  GaussRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);

  const std::size_t m = (n + 1) / 2;
  const double xm = 0.5 * (b + a);
  const double xl = 0.5 * (b - a);
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    int it = 0;
    for (; it < kNewtonMaxIt; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= kNewtonEps) break;
    }
    if (it >= kNewtonMaxIt)
      throw std::runtime_error("gauss_legendre: Newton iteration did not converge");
    rule.nodes[i] = xm - xl * z;
    rule.nodes[n - 1 - i] = xm + xl * z;
    rule.weights[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

}  // namespace dyson::quadrature
