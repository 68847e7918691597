#pragma once

#include <span>
#include <vector>

#include "dyson/configuration.hpp"
#include "dyson/rng.hpp"
#include "dyson/stochastic_paths.hpp"

namespace dyson {

/// An ordered n-particle path: one strictly increasing state per grid time.
struct Trajectory {
  TimeGrid grid;
  std::vector<std::vector<double>> states;

  const std::vector<double>& at_time(double t) const { return states[grid.index_of(t)]; }
};

/// Dense Hermitian matrix state of the matrix-valued diffusion.
struct HermitianState {
  std::size_t n = 0;
  std::vector<Complex> entries;  // row-major

  static HermitianState diagonal(const Configuration& xi);
  Complex at(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
  bool is_hermitian(double tol = 1e-12) const;
  std::vector<double> eigenvalues() const;
};

struct SdeOptions {
  // Substep floor. Pair gaps behave like a 3d Bessel process: the chance of
  // dipping to gap g scales like g / (initial gap), and a dip that reaches
  // the floor-binding scale sqrt(dt_min / gap_factor) breaks the ordering
  // almost surely. The default keeps that scale near 1e-8, i.e. a breakdown
  // probability around 3e-7 per unit-gap path. Substeps are exact binary
  // fractions of the grid interval, so tiny dt stays representable.
  double dt_min = 1e-17;
  bool adaptive = true;
  // Substep size cap: a step is halved while dt > gap_factor * (min gap)^2.
  double gap_factor = 0.1;
};

/// Euler-Maruyama integration of the interacting system
///   dX_i = dB_i + sum_{j != i} dt / (X_i - X_j),
/// with gap-adaptive substepping: a substep is halved (down to dt_min)
/// whenever it exceeds gap_factor * g^2 for the current minimal gap g, and a
/// substep whose outcome breaks the ordering is re-run as two halves. When no
/// further halving is possible and the ordering is still broken, the failure
/// is reported as CollisionBreakdown, never repaired.
///
/// Without adaptivity the caller is responsible for a grid step at most
/// 0.01 * (min initial gap)^2; a broken ordering then throws immediately.
Trajectory simulate_sde(const Configuration& xi, const TimeGrid& grid, RngStream& rng,
                        const SdeOptions& options = {});

/// Eigenvalue process of the Hermitian matrix Brownian motion started at
/// diag(u): real diagonal increments of variance dt, complex off-diagonal
/// increments with independent N(0, dt/2) parts. Eigenvalues are extracted at
/// each grid time by cyclic Jacobi iteration and emitted in ascending order.
Trajectory simulate_gue(const Configuration& xi, const TimeGrid& grid, RngStream& rng);

/// Karlin-McGregor determinant det[p_{0,t}(u_i, x_j)] of Gaussian heat
/// kernels: the transition density of absorbing multi-particle BM in the
/// ordered chamber. Antisymmetric under column swaps.
double km_transition_density(std::span<const double> u, std::span<const double> x, double t);

/// Exact transition density of the interacting system from xi:
/// km_transition_density(u, x, t) * h(x) / h(u).
double h_transform_density(const Configuration& xi, std::span<const double> x, double t);

}  // namespace dyson
