#include "dyson/dyson_simulators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dyson/errors.hpp"
#include "dyson/linalg.hpp"

namespace dyson {

namespace {

double min_gap(const std::vector<double>& x) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < x.size(); ++i) g = std::min(g, x[i] - x[i - 1]);
  return g;
}

bool strictly_increasing(const std::vector<double>& x) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) return false;
  return true;
}

class SdeStepper {
 public:
  SdeStepper(RngStream& rng, const SdeOptions& opt, std::size_t n)
      : rng_(rng), opt_(opt), drift_(n), proposal_(n) {}

  void advance(std::vector<double>& x, double dt) {
    const std::size_t n = x.size();
    if (n > 1 && opt_.adaptive && dt > opt_.gap_factor * min_gap(x) * min_gap(x) &&
        dt * 0.5 >= opt_.dt_min) {
      advance(x, dt * 0.5);
      advance(x, dt * 0.5);
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double d = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) d += 1.0 / (x[i] - x[j]);
      drift_[i] = d;
    }
    const double sdt = std::sqrt(dt);
    for (std::size_t i = 0; i < n; ++i)
      proposal_[i] = x[i] + drift_[i] * dt + sdt * rng_.gaussian();
    if (strictly_increasing(proposal_)) {
      x = proposal_;
      return;
    }
    // The increment overshot the gap. Refine through the event with fresh
    // noise at half the step; at the dt_min floor the breakdown is reported.
    if (opt_.adaptive && dt * 0.5 >= opt_.dt_min) {
      advance(x, dt * 0.5);
      advance(x, dt * 0.5);
      return;
    }
    throw CollisionBreakdown("simulate_sde: ordering violated at dt = " + std::to_string(dt));
  }

 private:
  RngStream& rng_;
  const SdeOptions& opt_;
  std::vector<double> drift_;
  std::vector<double> proposal_;
};

}  // namespace

Trajectory simulate_sde(const Configuration& xi, const TimeGrid& grid, RngStream& rng,
                        const SdeOptions& options) {
  Trajectory traj{grid, {}};
  traj.states.reserve(grid.size());
  std::vector<double> x = xi.points();
  traj.states.push_back(x);
  SdeStepper stepper(rng, options, x.size());
  for (std::size_t k = 1; k < grid.size(); ++k) {
    stepper.advance(x, grid[k] - grid[k - 1]);
    traj.states.push_back(x);
  }
  return traj;
}

HermitianState HermitianState::diagonal(const Configuration& xi) {
  HermitianState h;
  h.n = xi.size();
  h.entries.assign(h.n * h.n, Complex(0.0, 0.0));
  for (std::size_t i = 0; i < h.n; ++i) h.entries[i * h.n + i] = xi[i];
  return h;
}

bool HermitianState::is_hermitian(double tol) const {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (std::abs(entries[i * n + j] - std::conj(entries[j * n + i])) > tol) return false;
  return true;
}

std::vector<double> HermitianState::eigenvalues() const {
  return linalg::hermitian_eigenvalues(entries, n);
}

Trajectory simulate_gue(const Configuration& xi, const TimeGrid& grid, RngStream& rng) {
  const std::size_t n = xi.size();
  Trajectory traj{grid, {}};
  traj.states.reserve(grid.size());
  traj.states.push_back(xi.points());

  HermitianState h = HermitianState::diagonal(xi);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double dt = grid[k] - grid[k - 1];
    const double diag_sd = std::sqrt(dt);
    const double off_sd = std::sqrt(dt * 0.5);
    for (std::size_t i = 0; i < n; ++i) {
      h.entries[i * n + i] += diag_sd * rng.gaussian();
      for (std::size_t j = i + 1; j < n; ++j) {
        const Complex dh(off_sd * rng.gaussian(), off_sd * rng.gaussian());
        h.entries[i * n + j] += dh;
        h.entries[j * n + i] += std::conj(dh);
      }
    }
    traj.states.push_back(h.eigenvalues());
  }
  return traj;
}

double km_transition_density(std::span<const double> u, std::span<const double> x, double t) {
  const std::size_t n = u.size();
  if (x.size() != n) throw DimensionMismatch("km_transition_density: u and x sizes differ");
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = heat_kernel(0.0, t, u[i], x[j]);
  return linalg::det_inplace(a, n);
}

double h_transform_density(const Configuration& xi, std::span<const double> x, double t) {
  return km_transition_density(xi.points(), x, t) * vandermonde(x) /
         vandermonde(std::span<const double>(xi.points()));
}

}  // namespace dyson
