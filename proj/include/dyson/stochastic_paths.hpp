#pragma once

#include <cstdint>
#include <vector>

#include "dyson/configuration.hpp"
#include "dyson/entire_functions.hpp"
#include "dyson/numeric.hpp"
#include "dyson/rng.hpp"

namespace dyson {

/// Strictly increasing sample times starting at 0.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> times);

  /// n_steps uniform steps over [0, T] (n_steps + 1 grid points).
  static TimeGrid uniform(double T, std::size_t n_steps);

  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }
  double operator[](std::size_t k) const { return times_[k]; }
  double max_step() const { return max_step_; }

  /// Index of the grid time equal to t (within 1e-12); throws GridMismatch.
  std::size_t index_of(double t) const;

  bool operator==(const TimeGrid& other) const { return times_ == other.times_; }

 private:
  std::vector<double> times_;
  double max_step_ = 0.0;
};

struct RealPath {
  TimeGrid grid;
  std::vector<double> values;
};

/// Complex Brownian motion samples: independent real and imaginary parts on a
/// common grid, Im starting at 0.
struct ComplexPath {
  RealPath re;
  RealPath im;

  Complex at(std::size_t k) const { return {re.values[k], im.values[k]}; }
};

/// Brownian motion from v0 on the grid: exact Gaussian increments of variance
/// equal to the step, no discretization error.
RealPath sample_real_bm(double v0, const TimeGrid& grid, RngStream& rng);

/// Complex BM from v0 + 0i. The real part consumes stream (seed, id) and the
/// imaginary part the disjoint stream (seed, id + 1), so the two are
/// independent by stream separation.
ComplexPath sample_cbm(double v0, const TimeGrid& grid, std::uint64_t seed,
                       std::uint64_t stream_id);

/// A system of n independent CBMs started at the support of xi. Path i draws
/// its real part from stream base + i and its imaginary part from
/// base + n + i; the whole system occupies exactly [base, base + 2n).
std::vector<ComplexPath> sample_cbm_system(const Configuration& xi, const TimeGrid& grid,
                                           std::uint64_t seed, std::uint64_t stream_base);

/// det [Phi_xi^{u_i}(Z_j(t))] for a CBM system at grid time t.
/// Throws DimensionMismatch if the system size differs from xi(R), and
/// GridMismatch if t is not a grid time of every path (or the start points
/// do not match the support).
Complex det_martingale_along_path(const Configuration& xi, const std::vector<ComplexPath>& paths,
                                  double t);

}  // namespace dyson
