#include "dyson/configuration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dyson/errors.hpp"

namespace dyson {

Configuration::Configuration(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty())
    throw std::invalid_argument("Configuration: at least one support point required");
  std::sort(points_.begin(), points_.end());
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i] - points_[i - 1] <= kCoincidenceTol)
      throw DuplicatePoint("Configuration: points " + std::to_string(points_[i - 1]) + " and " +
                           std::to_string(points_[i]) + " coincide");
  }
}

int Configuration::find_index(double u) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), u - kCoincidenceTol);
  if (it != points_.end() && std::abs(*it - u) <= kCoincidenceTol)
    return static_cast<int>(it - points_.begin());
  return -1;
}

double Configuration::min_gap() const {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < points_.size(); ++i) g = std::min(g, points_[i] - points_[i - 1]);
  return g;
}

Configuration new_configuration(std::vector<double> points) {
  return Configuration(std::move(points));
}

InfiniteConfigSpec InfiniteConfigSpec::lattice(double spacing, double offset) {
  if (spacing <= 0.0) throw std::invalid_argument("lattice: spacing must be positive");
  InfiniteConfigSpec spec;
  spec.is_lattice = true;
  spec.spacing = spacing;
  spec.offset = offset;
  spec.generator = [spacing, offset](double L) {
    std::vector<double> pts;
    const long k_lo = static_cast<long>(std::ceil((-L - offset) / spacing));
    const long k_hi = static_cast<long>(std::floor((L - offset) / spacing));
    pts.reserve(static_cast<std::size_t>(std::max(0L, k_hi - k_lo + 1)));
    for (long k = k_lo; k <= k_hi; ++k) pts.push_back(offset + static_cast<double>(k) * spacing);
    return pts;
  };
  return spec;
}

Configuration restrict(const Configuration& xi, double L) {
  std::vector<double> pts;
  for (double x : xi.points())
    if (std::abs(x) <= L) pts.push_back(x);
  if (pts.empty()) throw EmptyRestriction("restrict: no support points in [-L, L]");
  return Configuration(std::move(pts));
}

Configuration restrict(const InfiniteConfigSpec& spec, double L) {
  std::vector<double> pts = spec.generator(L);
  if (pts.empty()) throw EmptyRestriction("restrict: no support points in [-L, L]");
  return Configuration(std::move(pts));
}

std::vector<double> shift_and_square(const Configuration& xi, double u) {
  std::vector<double> out;
  out.reserve(xi.size());
  for (double x : xi.points()) out.push_back(x * x + u);
  std::sort(out.begin(), out.end());
  return out;
}

double moment_M(const Configuration& xi, double L) {
  double s = 0.0;
  for (double x : xi.points())
    if (x != 0.0 && std::abs(x) <= L) s += 1.0 / x;
  return s;
}

double moment_M_alpha(const Configuration& xi, double alpha, double L) {
  if (!(alpha > 1.0 && alpha < 2.0))
    throw InvalidAlpha("moment_M_alpha: alpha must lie in (1, 2)");
  double s = 0.0;
  for (double x : xi.points())
    if (x != 0.0 && std::abs(x) <= L) s += std::pow(std::abs(x), -alpha);
  return std::pow(s, 1.0 / alpha);
}

namespace {

// M_1 of a multiset (repeats allowed), the squared-shifted configurations
// legitimately carry multiplicity 2.
double moment_M1_multiset(const std::vector<double>& pts) {
  double s = 0.0;
  for (double x : pts)
    if (x != 0.0) s += 1.0 / std::abs(x);
  return s;
}

}  // namespace

ConditionReport check_conditions(const Configuration& xi, const ConditionParams& params,
                                 const std::vector<double>& L_grid) {
  if (L_grid.empty()) throw std::invalid_argument("check_conditions: empty L grid");
  ConditionReport rep;
  rep.constants = params;
  rep.alpha = params.alpha;

  rep.satisfied_C1 = true;
  for (double L : L_grid) {
    const double m = moment_M(xi, L);
    rep.M_values.emplace_back(L, m);
    if (!(std::abs(m) < params.C0)) rep.satisfied_C1 = false;
  }

  const double L_max = L_grid.back();
  // A configuration whose window carries no nonzero point has an empty sum;
  // moment_M_alpha returns 0^(1/alpha) = 0, which satisfies any C1 > 0.
  rep.M_alpha = moment_M_alpha(xi, params.alpha, L_max);
  bool c2 = rep.M_alpha <= params.C1;

  for (double a : xi.points()) {
    if (std::abs(a) > L_max) continue;
    const double m1 = moment_M1_multiset(shift_and_square(xi, -a * a));
    rep.c2ii_values.emplace_back(a, m1);
    if (!(m1 <= params.C2 * std::pow(std::max(std::abs(a), 1.0), -params.beta))) c2 = false;
  }
  rep.satisfied_C2 = c2;
  return rep;
}

ConditionReport check_conditions(const InfiniteConfigSpec& spec, const ConditionParams& params,
                                 const std::vector<double>& L_grid) {
  if (L_grid.empty()) throw std::invalid_argument("check_conditions: empty L grid");
  return check_conditions(restrict(spec, L_grid.back()), params, L_grid);
}

double vandermonde(std::span<const double> x) {
  double h = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) h *= x[j] - x[i];
  return h;
}

Complex vandermonde(std::span<const Complex> x) {
  Complex h = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) h *= x[j] - x[i];
  return h;
}

}  // namespace dyson
