#include <doctest.h>

#include <cmath>

#include "dyson/configuration.hpp"
#include "dyson/errors.hpp"
#include "dyson/linalg.hpp"
#include "dyson/rng.hpp"
#include "test_support.hpp"

using dyson::Configuration;
using dyson::InfiniteConfigSpec;

TEST_CASE("new_configuration sorts and rejects duplicates") {
  const auto c = dyson::new_configuration({1.0, 0.0});
  CHECK(c.points() == std::vector<double>{0.0, 1.0});

  const auto single = dyson::new_configuration({0.0});
  CHECK(single.points() == std::vector<double>{0.0});

  CHECK_THROWS_AS(dyson::new_configuration({0.0, 0.0}), dyson::DuplicatePoint);
  CHECK_THROWS_AS(dyson::new_configuration({1.0, 1.0 + 1e-13}), dyson::DuplicatePoint);
  CHECK_THROWS_AS(dyson::new_configuration({}), std::invalid_argument);
}

TEST_CASE("restrict windows") {
  const auto lattice = InfiniteConfigSpec::lattice();
  const auto w = dyson::restrict(lattice, 2.5);
  CHECK(w.points() == std::vector<double>{-2, -1, 0, 1, 2});

  const Configuration xi({-3.0, 0.5, 4.0});
  CHECK(dyson::restrict(xi, 1.0).points() == std::vector<double>{0.5});

  const Configuration far({5.0});
  CHECK_THROWS_AS(dyson::restrict(far, 1.0), dyson::EmptyRestriction);
}

TEST_CASE("shift_and_square keeps multiplicity") {
  CHECK(dyson::shift_and_square(Configuration({-1.0, 1.0}), 0.0) ==
        std::vector<double>{1.0, 1.0});
  CHECK(dyson::shift_and_square(Configuration({0.0, 2.0}), -4.0) ==
        std::vector<double>{-4.0, 0.0});
  CHECK(dyson::shift_and_square(Configuration({3.0}), 1.0) == std::vector<double>{10.0});
}

TEST_CASE("moment_M") {
  const auto lattice10 = dyson::restrict(InfiniteConfigSpec::lattice(), 10.0);
  CHECK(dyson::moment_M(lattice10, 10.0) == doctest::Approx(0.0));  // symmetric cancellation

  CHECK(dyson::moment_M(Configuration({1.0, 2.0}), 10.0) == doctest::Approx(1.5));

  // Harmonic partial sum oracle, frozen: H_100.
  std::vector<double> pts;
  for (int k = 1; k <= 100; ++k) pts.push_back(k);
  CHECK(dyson::moment_M(Configuration(pts), 100.0) ==
        doctest::Approx(5.1873775176396203).epsilon(1e-12));
}

TEST_CASE("moment_M is additive in a new positive point") {
  const Configuration base({1.0, 2.0, 5.0});
  const Configuration plus({1.0, 2.0, 5.0, 4.0});
  CHECK(dyson::moment_M(plus, 10.0) - dyson::moment_M(base, 10.0) == doctest::Approx(0.25));
}

TEST_CASE("moment_M_alpha") {
  CHECK(dyson::moment_M_alpha(Configuration({1.0}), 1.3, 2.0) == doctest::Approx(1.0));
  // single point algebra: (2^-1.5)^(1/1.5) = 0.5
  CHECK(dyson::moment_M_alpha(Configuration({2.0}), 1.5, 10.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(dyson::moment_M_alpha(Configuration({1.0}), 2.5, 2.0), dyson::InvalidAlpha);
  CHECK_THROWS_AS(dyson::moment_M_alpha(Configuration({1.0}), 1.0, 2.0), dyson::InvalidAlpha);

  // Lattice partial-sum oracle at L = 10^6, frozen before the build.
  const auto window = dyson::restrict(InfiniteConfigSpec::lattice(), 1e6);
  CHECK(dyson::moment_M_alpha(window, 1.5, 1e6) ==
        doctest::Approx(3.0094604263273843).epsilon(1e-10));
}

TEST_CASE("check_conditions on the integer lattice") {
  const dyson::ConditionParams params{1.0, 1.5, 4.0, 0.5, 10.0};
  const auto rep =
      dyson::check_conditions(InfiniteConfigSpec::lattice(), params, {1.0, 10.0, 100.0});
  CHECK(rep.satisfied_C1);
  CHECK(rep.satisfied_C2);
  CHECK(rep.M_values.size() == 3);
  for (const auto& [L, m] : rep.M_values) CHECK(std::abs(m) < 1e-12);
}

TEST_CASE("check_conditions: single particle at the origin is trivial") {
  const dyson::ConditionParams params{0.1, 1.5, 0.1, 2.0, 0.1};
  const auto rep = dyson::check_conditions(Configuration({0.0}), params, {1.0, 5.0});
  CHECK(rep.satisfied_C1);  // empty sums
  CHECK(rep.satisfied_C2);
}

TEST_CASE("check_conditions: C1 failure is data") {
  const dyson::ConditionParams params{0.5, 1.5, 4.0, 0.5, 10.0};
  const auto rep = dyson::check_conditions(Configuration({1.0}), params, {1.0, 10.0});
  CHECK_FALSE(rep.satisfied_C1);  // M({1}, 1) = 1 >= 0.5
}

TEST_CASE("vandermonde basics") {
  CHECK(dyson::vandermonde(std::vector<double>{5.0}) == doctest::Approx(1.0));
  CHECK(dyson::vandermonde(std::vector<double>{0.0, 1.0, 2.0}) == doctest::Approx(2.0));
  CHECK(dyson::vandermonde(std::vector<double>{0.0, 1.0, 2.0, 3.0}) == doctest::Approx(12.0));
}

TEST_CASE("vandermonde equals the power-matrix determinant") {
  dyson::RngStream rng(2024, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 7.0);
    std::vector<double> x;
    while (x.size() < n) {
      const double cand = -5.0 + 10.0 * rng.uniform();
      bool ok = true;
      for (double v : x) ok = ok && std::abs(v - cand) >= 1e-3;
      if (ok) x.push_back(cand);
    }
    std::sort(x.begin(), x.end());
    std::vector<double> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m[i * n + j] = std::pow(x[i], static_cast<double>(j));
    const double direct = dyson::vandermonde(std::span<const double>(x));
    const double via_det = dyson::linalg::det(m, n);
    CHECK(std::abs(direct - via_det) <= 1e-10 * std::max(1.0, std::abs(via_det)));
    CHECK(direct > 0.0);  // strictly increasing input
  }
}
