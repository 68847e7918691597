#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "dyson/configuration.hpp"
#include "dyson/numeric.hpp"
#include "dyson/quadrature.hpp"

namespace dyson {

struct ContourSpec {
  Complex center{0.0, 0.0};
  double radius = 1.0;
  std::size_t n_nodes = 256;
};

struct KernelOptions {
  std::size_t gh_order = 64;
  std::size_t contour_nodes = 256;
  double horizon = std::numeric_limits<double>::infinity();
  // When set, every kernel evaluation is repeated at doubled quadrature order
  // and QuadratureOrderTooLow is thrown if the two disagree.
  bool refine_check = false;
  std::optional<ContourSpec> contour;  // default: circle around the support
};

/// Immutable bundle of a configuration with its quadrature rules; all
/// evaluations against it are pure and safe to share across threads.
class KernelContext {
 public:
  explicit KernelContext(Configuration xi, KernelOptions options = {});

  const Configuration& xi() const { return xi_; }
  const KernelOptions& options() const { return options_; }
  const quadrature::GaussRule& gh_rule() const { return gh_; }
  const quadrature::GaussRule& gh_rule_fine() const { return gh_fine_; }
  const ContourSpec& contour() const { return contour_; }
  double horizon() const { return options_.horizon; }

  /// Same context with doubled Gauss-Hermite order (refine-and-compare mode).
  KernelContext refined() const;

 private:
  Configuration xi_;
  KernelOptions options_;
  quadrature::GaussRule gh_;
  quadrature::GaussRule gh_fine_;
  ContourSpec contour_;
};

/// G_{s,t}(x,y): sum over support points v of p_{0,s}(v,x) times the Gaussian
/// average of Phi_xi^v over the vertical line through y at scale sqrt(t). The
/// average is a Gauss-Hermite sum whose imaginary part cancels by node
/// symmetry (asserted below 1e-10).
double green_G(const KernelContext& ctx, double s, double t, double x, double y);

/// Extended kernel K_xi(s,x;t,y) = G_{s,t}(x,y) - 1(s>t) p_{t,s}(y,x).
double kernel_K(const KernelContext& ctx, double s, double x, double t, double y);

/// One-point density rho_xi(t,x) = G_{t,t}(x,x).
double density(const KernelContext& ctx, double t, double x);

/// Times with one point vector per time; the block determinant of kernel_K
/// values over all (time, point) pairs is the multitime correlation function.
struct CorrelationRequest {
  std::vector<double> times;
  std::vector<std::vector<double>> points;
};

double multitime_correlation(const KernelContext& ctx, const CorrelationRequest& req);

struct GridSpec {
  double a;
  double b;
  std::size_t m = 200;
};

struct MgfResult {
  double value;             // Nystrom determinant at order m
  double refinement_delta;  // |value(2m) - value(m)|
};

/// Moment generating functional as a Fredholm determinant: Nystrom
/// discretization of det(I + K chi) on a Gauss-Legendre grid over [a,b],
/// where chi_t = e^{f_t} - 1 is supplied per time. The order-doubling
/// comparison always runs; disagreement beyond 1e-6 relative throws
/// QuadratureOrderTooLow.
MgfResult fredholm_mgf(const KernelContext& ctx, const std::vector<double>& times,
                       const std::vector<std::function<double(double)>>& chi,
                       const GridSpec& grid);

/// Same kernel through the closed-contour route: trapezoid rule around the
/// support for the outer integral, Gauss-Hermite for the inner one. Agrees
/// with kernel_K to quadrature accuracy; kept as an independent evaluation
/// path. Throws ContourTooClose if the contour passes within 1e-3 of a
/// support point.
double contour_kernel_K(const KernelContext& ctx, double s, double x, double t, double y);

}  // namespace dyson
