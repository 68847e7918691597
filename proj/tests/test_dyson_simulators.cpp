#include <doctest.h>

#include <cmath>

#include "dyson/dyson_simulators.hpp"
#include "dyson/errors.hpp"
#include "dyson/quadrature.hpp"
#include "test_support.hpp"

using dyson::Configuration;
using dyson::TimeGrid;

TEST_CASE("km transition density basics") {
  const std::vector<double> u0{0.0}, x0{0.0};
  CHECK(dyson::km_transition_density(u0, x0, 1.0) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-12));

  // frozen hand arithmetic: p(0)^2 - p(1)^2
  const std::vector<double> u{0.0, 1.0}, x{0.0, 1.0};
  CHECK(dyson::km_transition_density(u, x, 1.0) ==
        doctest::Approx(0.10060511156757618).epsilon(1e-12));

  const std::vector<double> swapped{1.0, 0.0};
  CHECK(dyson::km_transition_density(u, swapped, 1.0) ==
        doctest::Approx(-0.10060511156757618).epsilon(1e-12));
}

TEST_CASE("km satisfies Chapman-Kolmogorov, n = 2") {
  const std::vector<double> u{0.0, 1.0}, x{-0.3, 1.4};
  const double s = 0.4, t = 1.0;
  // integrate over the ordered sector via symmetry: the integrand is
  // symmetric under swapping the intermediate pair, so half the full square
  const auto rule = dyson::quadrature::gauss_legendre(-7.0, 8.0, 160);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const std::vector<double> y{rule.nodes[i], rule.nodes[j]};
      acc += rule.weights[i] * rule.weights[j] * dyson::km_transition_density(u, y, s) *
             dyson::km_transition_density(y, x, t - s);
    }
  }
  acc *= 0.5;
  CHECK(acc == doctest::Approx(dyson::km_transition_density(u, x, t)).epsilon(1e-5));
}

TEST_CASE("h transform density: single particle and normalization") {
  const Configuration single({0.0});
  const std::vector<double> x{0.7};
  CHECK(dyson::h_transform_density(single, x, 0.5) ==
        doctest::Approx(dyson::heat_kernel(0.0, 0.5, 0.0, 0.7)).epsilon(1e-12));

  // mass of the 2-particle density over the ordered sector = 1
  const Configuration xi({0.0, 1.0});
  const auto rule = dyson::quadrature::gauss_legendre(-5.0, 6.0, 200);
  double mass = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const std::vector<double> y{rule.nodes[i], rule.nodes[j]};
      mass += 0.5 * rule.weights[i] * rule.weights[j] *
              std::abs(dyson::h_transform_density(xi, y, 0.5));
    }
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sde: single particle is plain Brownian motion") {
  const Configuration xi({0.0});
  const TimeGrid grid = TimeGrid::uniform(1.0, 10);
  dyson::RngStream rng(21, 0);
  const auto traj = dyson::simulate_sde(xi, grid, rng);
  dyson::RngStream rng2(21, 0);
  const auto bm = dyson::sample_real_bm(0.0, grid, rng2);
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK(traj.states[k][0] == doctest::Approx(bm.values[k]).epsilon(1e-15));
}

TEST_CASE("sde keeps strict ordering across paths") {
  const Configuration xi({-1.0, -0.3, 0.4, 1.2});
  const TimeGrid grid = TimeGrid::uniform(0.5, 50);
  bool ordered = true;
  for (int p = 0; p < 10000; ++p) {
    dyson::RngStream rng(33, static_cast<std::uint64_t>(p));
    const auto traj = dyson::simulate_sde(xi, grid, rng);
    for (const auto& state : traj.states)
      for (std::size_t i = 1; i < state.size(); ++i) ordered = ordered && state[i] > state[i - 1];
  }
  CHECK(ordered);
}

TEST_CASE("sde mean gap matches the exact transition density, n = 2") {
  const Configuration xi({-1.0, 1.0});
  const double t = 1.0;

  // oracle: E[X_2 - X_1] under the exact density by tensor quadrature
  const auto rule = dyson::quadrature::gauss_legendre(-7.0, 7.0, 200);
  double expected = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const std::vector<double> y{rule.nodes[i], rule.nodes[j]};
      const double w =
          0.5 * rule.weights[i] * rule.weights[j] * std::abs(dyson::h_transform_density(xi, y, t));
      expected += w * std::abs(y[1] - y[0]);
    }
  }

  const TimeGrid grid = TimeGrid::uniform(t, 100);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int p = 0; p < n; ++p) {
    dyson::RngStream rng(99, static_cast<std::uint64_t>(p));
    const auto traj = dyson::simulate_sde(xi, grid, rng);
    const double gap = traj.states.back()[1] - traj.states.back()[0];
    s += gap;
    s2 += gap * gap;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / (n - 1));
  CHECK(std::abs(mean - expected) <= 3.0 * se + 0.01);  // 0.01 discretization allowance
}

TEST_CASE("sde without adaptivity can break down and reports it") {
  const Configuration xi({-2.0, 0.0, 2.0});
  const TimeGrid grid = TimeGrid::uniform(1.0, 10);  // dt = 0.1, far too coarse near contact
  dyson::SdeOptions opt;
  opt.adaptive = false;
  std::size_t breakdowns = 0;
  for (int p = 0; p < 2000; ++p) {
    dyson::RngStream rng(123, static_cast<std::uint64_t>(p));
    try {
      dyson::simulate_sde(xi, grid, rng, opt);
    } catch (const dyson::CollisionBreakdown&) {
      ++breakdowns;
    }
  }
  CHECK(breakdowns > 0);  // negative control: adaptivity is on by default for a reason

  std::size_t adaptive_breakdowns = 0;
  for (int p = 0; p < 2000; ++p) {
    dyson::RngStream rng(123, static_cast<std::uint64_t>(p));
    try {
      dyson::simulate_sde(xi, grid, rng);
    } catch (const dyson::CollisionBreakdown&) {
      ++adaptive_breakdowns;
    }
  }
  CHECK(adaptive_breakdowns == 0);
}

TEST_CASE("gue: degenerate cases") {
  const Configuration single({0.5});
  const TimeGrid grid = TimeGrid::uniform(1.0, 4);
  dyson::RngStream rng(7, 0);
  const auto traj = dyson::simulate_gue(single, grid, rng);
  dyson::RngStream rng2(7, 0);
  const auto bm = dyson::sample_real_bm(0.5, grid, rng2);
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK(traj.states[k][0] == doctest::Approx(bm.values[k]).epsilon(1e-12));

  const Configuration xi({-1.0, 0.0, 2.0});
  dyson::RngStream rng3(8, 0);
  const auto t0 = dyson::simulate_gue(xi, TimeGrid::uniform(0.5, 1), rng3);
  CHECK(t0.states[0] == xi.points());  // eigenvalues of diag(u) at t = 0
}

TEST_CASE("gue eigenvalues stay ordered and spread with time") {
  const Configuration xi({-1.0, 1.0});
  const TimeGrid grid({0.0, 0.25, 1.0});
  double mean_gap_t1 = 0.0;
  const int n = 2000;
  for (int p = 0; p < n; ++p) {
    dyson::RngStream rng(17, static_cast<std::uint64_t>(p));
    const auto traj = dyson::simulate_gue(xi, grid, rng);
    for (const auto& st : traj.states) CHECK(st[1] > st[0]);
    mean_gap_t1 += traj.states.back()[1] - traj.states.back()[0];
  }
  mean_gap_t1 /= n;
  CHECK(mean_gap_t1 > 2.0);  // repulsion widens the initial gap
}

TEST_CASE("hermitian state stays hermitian along the matrix diffusion") {
  const Configuration xi({-1.0, 0.0, 2.0});
  auto h = dyson::HermitianState::diagonal(xi);
  CHECK(h.is_hermitian());
  CHECK(h.eigenvalues() == xi.points());
  dyson::RngStream rng(55, 0);
  for (int step = 0; step < 20; ++step) {
    for (std::size_t i = 0; i < h.n; ++i) {
      h.entries[i * h.n + i] += 0.1 * rng.gaussian();
      for (std::size_t j = i + 1; j < h.n; ++j) {
        const dyson::Complex dh(0.07 * rng.gaussian(), 0.07 * rng.gaussian());
        h.entries[i * h.n + j] += dh;
        h.entries[j * h.n + i] += std::conj(dh);
      }
    }
  }
  CHECK(h.is_hermitian());
  CHECK(h.eigenvalues().size() == 3);
}
