#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dyson/numeric.hpp"

namespace dyson {

/// A finite particle configuration: strictly increasing support points, every
/// multiplicity 1. The type maintains the ordering invariant; construction
/// rejects coincident inputs (closer than kCoincidenceTol).
class Configuration {
 public:
  /// Sorts the given points. Throws DuplicatePoint on coincident entries and
  /// std::invalid_argument on an empty list.
  explicit Configuration(std::vector<double> points);

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }

  bool contains(double u) const { return find_index(u) >= 0; }
  /// Index of the support point coinciding with u, or -1.
  int find_index(double u) const;

  /// Number of support points at the origin (0 or 1).
  int multiplicity_at_zero() const { return contains(0.0) ? 1 : 0; }

  double min_gap() const;

 private:
  std::vector<double> points_;
};

/// Convenience constructor from unsorted points.
Configuration new_configuration(std::vector<double> points);

/// An unbounded configuration given by a deterministic window generator: for
/// any L > 0 it produces all support points inside [-L, L], strictly
/// increasing. The shipped instance is the scaled/offset integer lattice.
struct InfiniteConfigSpec {
  std::function<std::vector<double>(double L)> generator;
  // Lattice parameters kept for serialization; meaningful when is_lattice.
  bool is_lattice = false;
  double spacing = 1.0;
  double offset = 0.0;

  static InfiniteConfigSpec lattice(double spacing = 1.0, double offset = 0.0);
};

/// xi intersected with [-L, L]. Throws EmptyRestriction if nothing survives.
Configuration restrict(const Configuration& xi, double L);
Configuration restrict(const InfiniteConfigSpec& spec, double L);

/// Points of tau_u xi^<2>: x^2 + u for every support point x. The result is a
/// multiset (squaring can merge +-x), so it is returned as a plain sorted
/// vector, not a Configuration.
std::vector<double> shift_and_square(const Configuration& xi, double u);

/// M(xi, L) = sum over x in supp xi, 0 < |x| <= L, of 1/x.
double moment_M(const Configuration& xi, double L);

/// M_alpha(xi, L) = (sum |x|^-alpha)^(1/alpha) over the same window.
/// Throws InvalidAlpha unless alpha lies in (1, 2).
double moment_M_alpha(const Configuration& xi, double alpha, double L);

struct ConditionParams {
  double C0;
  double alpha;
  double C1;
  double beta;
  double C2;
};

struct ConditionReport {
  std::vector<std::pair<double, double>> M_values;   // (L, M(xi, L))
  double M_alpha = 0.0;                              // at L_max
  double alpha = 0.0;
  std::vector<std::pair<double, double>> c2ii_values;  // (a, M_1(tau_{-a^2} xi^<2>))
  bool satisfied_C1 = false;
  bool satisfied_C2 = false;
  ConditionParams constants{};
};

/// Finite-window evidence for the decay conditions on xi: |M(xi,L)| < C0 over
/// the whole L grid, M_alpha(xi, L_max) <= C1, and for every support point a
/// in [-L_max, L_max], M_1(tau_{-a^2} xi^<2>) <= C2 * max(|a|,1)^-beta.
/// Failure is recorded in the report, never thrown. The grid is the caller's
/// choice; the report documents exactly what was tested.
ConditionReport check_conditions(const Configuration& xi, const ConditionParams& params,
                                 const std::vector<double>& L_grid);
ConditionReport check_conditions(const InfiniteConfigSpec& spec, const ConditionParams& params,
                                 const std::vector<double>& L_grid);

/// Vandermonde product h(x) = prod_{i<j} (x_j - x_i), direct pairwise form.
double vandermonde(std::span<const double> x);
Complex vandermonde(std::span<const Complex> x);

}  // namespace dyson
