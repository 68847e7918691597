#include "dyson/stochastic_paths.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dyson/errors.hpp"

namespace dyson {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.empty()) throw std::invalid_argument("TimeGrid: empty");
  if (times_.front() != 0.0) throw std::invalid_argument("TimeGrid: must start at 0");
  for (std::size_t k = 1; k < times_.size(); ++k) {
    const double dt = times_[k] - times_[k - 1];
    if (dt <= 0.0) throw std::invalid_argument("TimeGrid: times must be strictly increasing");
    max_step_ = std::max(max_step_, dt);
  }
}

TimeGrid TimeGrid::uniform(double T, std::size_t n_steps) {
  if (!(T > 0.0) || n_steps == 0) throw std::invalid_argument("TimeGrid::uniform: bad arguments");
  std::vector<double> t(n_steps + 1);
  for (std::size_t k = 0; k <= n_steps; ++k)
    t[k] = T * static_cast<double>(k) / static_cast<double>(n_steps);
  return TimeGrid(std::move(t));
}

std::size_t TimeGrid::index_of(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t - 1e-12);
  if (it != times_.end() && std::abs(*it - t) <= 1e-12)
    return static_cast<std::size_t>(it - times_.begin());
  throw GridMismatch("TimeGrid: t = " + std::to_string(t) + " is not a grid time");
}

RealPath sample_real_bm(double v0, const TimeGrid& grid, RngStream& rng) {
  RealPath path{grid, std::vector<double>(grid.size())};
  path.values[0] = v0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double dt = grid[k] - grid[k - 1];
    path.values[k] = path.values[k - 1] + std::sqrt(dt) * rng.gaussian();
  }
  return path;
}

ComplexPath sample_cbm(double v0, const TimeGrid& grid, std::uint64_t seed,
                       std::uint64_t stream_id) {
  RngStream re_rng(seed, stream_id);
  RngStream im_rng(seed, stream_id + 1);
  return ComplexPath{sample_real_bm(v0, grid, re_rng), sample_real_bm(0.0, grid, im_rng)};
}

std::vector<ComplexPath> sample_cbm_system(const Configuration& xi, const TimeGrid& grid,
                                           std::uint64_t seed, std::uint64_t stream_base) {
  const std::size_t n = xi.size();
  std::vector<ComplexPath> paths;
  paths.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream re_rng(seed, stream_base + i);
    RngStream im_rng(seed, stream_base + n + i);
    paths.push_back(
        ComplexPath{sample_real_bm(xi[i], grid, re_rng), sample_real_bm(0.0, grid, im_rng)});
  }
  return paths;
}

Complex det_martingale_along_path(const Configuration& xi, const std::vector<ComplexPath>& paths,
                                  double t) {
  const std::size_t n = xi.size();
  if (paths.size() != n)
    throw DimensionMismatch("det_martingale_along_path: " + std::to_string(paths.size()) +
                            " paths for a " + std::to_string(n) + "-point configuration");
  std::vector<Complex> z(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!(paths[j].re.grid == paths[0].re.grid))
      throw GridMismatch("det_martingale_along_path: paths live on different grids");
    if (std::abs(paths[j].re.values[0] - xi[j]) > kCoincidenceTol)
      throw GridMismatch("det_martingale_along_path: path " + std::to_string(j) +
                         " does not start at its support point");
    z[j] = paths[j].at(paths[j].re.grid.index_of(t));
  }
  return det_martingale(xi, z);
}

}  // namespace dyson
