#pragma once

#include <cstddef>
#include <vector>

namespace dyson::quadrature {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Hermite rule in the probabilist's convention: for a standard normal
/// variable N, E[f(N)] ~= sum_q weights[q] * f(nodes[q]). Weights sum to 1.
GaussRule gauss_hermite_probabilist(std::size_t order);

/// Gauss-Legendre rule mapped to [a, b]: integral_a^b f ~= sum w_j f(x_j).
GaussRule gauss_legendre(double a, double b, std::size_t order);

}  // namespace dyson::quadrature
