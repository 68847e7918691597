#pragma once

#include <span>
#include <vector>

#include "dyson/configuration.hpp"
#include "dyson/numeric.hpp"

namespace dyson {

/// Value of Phi at one point, with the log of its modulus carried alongside
/// so long products stay diagnosable even when the plain value over/underflows.
struct PhiEvaluation {
  Complex value;
  double log_magnitude;
};

struct PhiMatrix {
  std::size_t n = 0;
  std::vector<Complex> entries;  // row-major, entries[i*n + j] = Phi^{u_i}(z_j)
  std::vector<double> u;
  std::vector<Complex> z;

  Complex at(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
};

/// Phi_xi^u(z): the product over support points x != u of (x - z)/(x - u).
/// Equals 1 at z = u and vanishes exactly on the rest of the support.
/// Factors are accumulated in ascending |x - u| order with power-of-two
/// rescaling; wide windows (10^4+ factors) stay finite this way.
///
/// Throws NotInSupport when u is not a support point of xi.
PhiEvaluation phi(const Configuration& xi, double u, Complex z);

/// The n x n matrix [Phi_xi^{u_i}(z_j)] for z of length n = xi(R).
/// Real z_j are evaluated in real arithmetic, so phi_matrix(xi, u) is exactly
/// the identity. Throws DimensionMismatch when z has the wrong length.
PhiMatrix phi_matrix(const Configuration& xi, std::span<const Complex> z);

/// det [Phi_xi^{u_i}(z_j)] by pivoted elimination; equals h(z)/h(u).
Complex det_martingale(const Configuration& xi, std::span<const Complex> z);
Complex det_martingale(const PhiMatrix& m);

/// Phi_{xi cap [-L,L]}^u(z) along an increasing window list; callers inspect
/// the sequence for Cauchy behavior.
std::vector<Complex> phi_truncation_sequence(const InfiniteConfigSpec& spec, double u, Complex z,
                                             const std::vector<double>& L_list);

struct GrowthBoundConstants {
  double c;
  double C;
  double theta;
};

struct GrowthBoundResult {
  double lhs;
  double rhs;
  bool ok;
};

/// Checks |Phi_xi^a(z)| against the envelope
///   C exp(c(|a|^theta + |z|^theta)) * |z/a|^{xi({0})} * |a/(a-z)|.
/// The two trailing factors are combined as |z|^{xi({0})} |a|^{1-xi({0})} / |a-z|,
/// which stays finite at a = 0 when the origin is a support point.
/// Throws DivisionGuard when |a - z| < 1e-12.
GrowthBoundResult growth_bound_check(const Configuration& xi, double a, Complex z,
                                     const GrowthBoundConstants& constants);

/// Batch evaluation of Phi_xi^{u}(zeta) for several labels u (given by support
/// indices) and many points zeta. Shares the full support product across
/// labels, so the cost is O(n) per zeta plus O(1) per (label, zeta) instead of
/// O(n) per pair; the kernel quadratures on wide lattice windows rely on this.
/// Results are exact zeros when zeta hits a support point other than u.
std::vector<std::vector<Complex>> phi_batch(const Configuration& xi,
                                            std::span<const std::size_t> label_indices,
                                            std::span<const Complex> zeta);

}  // namespace dyson
