#include "dyson/correlation_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dyson/entire_functions.hpp"
#include "dyson/errors.hpp"
#include "dyson/linalg.hpp"

namespace dyson {

namespace {

// Heat-kernel cutoff for the outer sum over the support: contributions with
// p_{0,s}(v,x) below this are dropped. The inner averages are bounded on the
// configurations this library targets, so the truncation error stays orders
// of magnitude below every advertised tolerance.
constexpr double kOuterCutoff = 1e-18;

void require_time_in_horizon(const KernelContext& ctx, double t, const char* what) {
  if (!(t > 0.0) || !(t < ctx.horizon()))
    throw std::invalid_argument(std::string(what) + ": time must lie in (0, T)");
}

// Support indices whose heat-kernel weight against any x in [x_lo, x_hi] at
// time s survives the cutoff.
std::vector<std::size_t> relevant_labels(const Configuration& xi, double s, double x_lo,
                                         double x_hi) {
  const double reach = std::sqrt(2.0 * s * std::log(1.0 / kOuterCutoff)) + 1.0;
  std::vector<std::size_t> idx;
  for (std::size_t v = 0; v < xi.size(); ++v)
    if (xi[v] >= x_lo - reach && xi[v] <= x_hi + reach) idx.push_back(v);
  return idx;
}

// Gauss-Hermite average of Phi_xi^v along the vertical line y + i sqrt(t) h,
// for every label at once. Nodes are summed as symmetric pairs, so the
// imaginary parts cancel exactly; the residual is still asserted.
std::vector<double> inner_averages(const Configuration& xi,
                                   const std::vector<std::size_t>& labels,
                                   const quadrature::GaussRule& gh, double t, double y) {
  const std::size_t q_count = gh.size();
  std::vector<Complex> zeta(q_count);
  const double scale = std::sqrt(t);
  for (std::size_t q = 0; q < q_count; ++q) zeta[q] = Complex(y, scale * gh.nodes[q]);
  const auto values = phi_batch(xi, labels, zeta);

  std::vector<double> avg(labels.size());
  for (std::size_t li = 0; li < labels.size(); ++li) {
    Complex sum(0.0, 0.0);
    for (std::size_t q = 0, r = q_count - 1; q < r; ++q, --r)
      sum += gh.weights[q] * (values[li][q] + values[li][r]);
    if (q_count % 2 == 1) sum += gh.weights[q_count / 2] * values[li][q_count / 2];
    if (!(std::abs(sum.imag()) < 1e-10))
      throw std::logic_error("inner_averages: imaginary residual exceeds 1e-10");
    avg[li] = sum.real();
  }
  return avg;
}

double green_G_with_rule(const KernelContext& ctx, const quadrature::GaussRule& gh, double s,
                         double t, double x, double y) {
  const Configuration& xi = ctx.xi();
  const auto labels = relevant_labels(xi, s, x, x);
  if (labels.empty()) return 0.0;
  const auto avg = inner_averages(xi, labels, gh, t, y);
  double g = 0.0;
  for (std::size_t li = 0; li < labels.size(); ++li)
    g += heat_kernel(0.0, s, xi[labels[li]], x) * avg[li];
  return g;
}

}  // namespace

KernelContext::KernelContext(Configuration xi, KernelOptions options)
    : xi_(std::move(xi)), options_(options) {
  if (options_.gh_order < 2) throw std::invalid_argument("KernelContext: gh_order too small");
  gh_ = quadrature::gauss_hermite_probabilist(options_.gh_order);
  gh_fine_ = quadrature::gauss_hermite_probabilist(2 * options_.gh_order);

  const double lo = xi_.points().front();
  const double hi = xi_.points().back();
  if (options_.contour) {
    contour_ = *options_.contour;
  } else {
    contour_.center = Complex(0.5 * (lo + hi), 0.0);
    contour_.radius = 1.5 * 0.5 * (hi - lo) + 1.0;
    contour_.n_nodes = options_.contour_nodes;
  }
  double max_dist = 0.0;
  for (double v : xi_.points()) max_dist = std::max(max_dist, std::abs(Complex(v, 0) - contour_.center));
  if (!(contour_.radius > max_dist))
    throw std::invalid_argument("KernelContext: contour must enclose the support");
}

KernelContext KernelContext::refined() const {
  KernelOptions opt = options_;
  opt.gh_order *= 2;
  return KernelContext(xi_, opt);
}

double green_G(const KernelContext& ctx, double s, double t, double x, double y) {
  require_time_in_horizon(ctx, s, "green_G");
  require_time_in_horizon(ctx, t, "green_G");
  const double g = green_G_with_rule(ctx, ctx.gh_rule(), s, t, x, y);
  if (ctx.options().refine_check) {
    const double g_fine = green_G_with_rule(ctx, ctx.gh_rule_fine(), s, t, x, y);
    if (std::abs(g_fine - g) > 1e-8 * std::max(1.0, std::abs(g)))
      throw QuadratureOrderTooLow("green_G: doubling the Gauss-Hermite order moved the result");
  }
  return g;
}

double kernel_K(const KernelContext& ctx, double s, double x, double t, double y) {
  double k = green_G(ctx, s, t, x, y);
  if (s > t) k -= heat_kernel(t, s, y, x);
  return k;
}

double density(const KernelContext& ctx, double t, double x) {
  return green_G(ctx, t, t, x, x);
}

double multitime_correlation(const KernelContext& ctx, const CorrelationRequest& req) {
  if (req.times.size() != req.points.size())
    throw DimensionMismatch("multitime_correlation: one point vector per time required");
  if (req.times.empty()) throw std::invalid_argument("multitime_correlation: empty request");
  for (std::size_t m = 0; m < req.times.size(); ++m) {
    require_time_in_horizon(ctx, req.times[m], "multitime_correlation");
    if (m > 0 && !(req.times[m] > req.times[m - 1]))
      throw std::invalid_argument("multitime_correlation: times must be strictly increasing");
  }

  std::vector<std::pair<double, double>> flat;  // (time, point)
  for (std::size_t m = 0; m < req.times.size(); ++m)
    for (double p : req.points[m]) flat.emplace_back(req.times[m], p);
  const std::size_t N = flat.size();
  if (N == 0) throw std::invalid_argument("multitime_correlation: no points requested");

  std::vector<double> a(N * N);
  for (std::size_t r = 0; r < N; ++r)
    for (std::size_t c = 0; c < N; ++c)
      a[r * N + c] = kernel_K(ctx, flat[r].first, flat[r].second, flat[c].first, flat[c].second);
  return linalg::det_inplace(a, N);
}

namespace {

double fredholm_at_order(const KernelContext& ctx, const std::vector<double>& times,
                         const std::vector<std::function<double(double)>>& chi,
                         const GridSpec& grid, std::size_t m) {
  const Configuration& xi = ctx.xi();
  const std::size_t M = times.size();
  const auto gl = quadrature::gauss_legendre(grid.a, grid.b, m);

  const double t_max = *std::max_element(times.begin(), times.end());
  const auto labels = relevant_labels(xi, t_max, grid.a, grid.b);

  // Factorized assembly: G_{s,t}(x,y) = sum_v p_{0,s}(v,x) * I_v(t,y), so the
  // heat-kernel table and the inner-average table are built once each.
  const std::size_t nl = labels.size();
  std::vector<std::vector<double>> p_table(M);       // [r][v*m + i]
  std::vector<std::vector<double>> inner_table(M);   // [c][v*m + j]
  for (std::size_t r = 0; r < M; ++r) {
    p_table[r].resize(nl * m);
    for (std::size_t v = 0; v < nl; ++v)
      for (std::size_t i = 0; i < m; ++i)
        p_table[r][v * m + i] = heat_kernel(0.0, times[r], xi[labels[v]], gl.nodes[i]);
  }
  for (std::size_t c = 0; c < M; ++c) {
    inner_table[c].resize(nl * m);
    for (std::size_t j = 0; j < m; ++j) {
      const auto avg = inner_averages(xi, labels, ctx.gh_rule(), times[c], gl.nodes[j]);
      for (std::size_t v = 0; v < nl; ++v) inner_table[c][v * m + j] = avg[v];
    }
  }

  const std::size_t N = M * m;
  std::vector<double> a(N * N);
  for (std::size_t r = 0; r < M; ++r) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t c = 0; c < M; ++c) {
        for (std::size_t j = 0; j < m; ++j) {
          double k = 0.0;
          for (std::size_t v = 0; v < nl; ++v)
            k += p_table[r][v * m + i] * inner_table[c][v * m + j];
          if (times[r] > times[c]) k -= heat_kernel(times[c], times[r], gl.nodes[j], gl.nodes[i]);
          a[(r * m + i) * N + (c * m + j)] = k * chi[c](gl.nodes[j]) * gl.weights[j];
        }
      }
    }
  }
  for (std::size_t d = 0; d < N; ++d) a[d * N + d] += 1.0;
  return linalg::det_inplace(a, N);
}

}  // namespace

MgfResult fredholm_mgf(const KernelContext& ctx, const std::vector<double>& times,
                       const std::vector<std::function<double(double)>>& chi,
                       const GridSpec& grid) {
  if (times.empty()) throw std::invalid_argument("fredholm_mgf: no times");
  if (chi.size() != times.size())
    throw DimensionMismatch("fredholm_mgf: one chi per time required");
  if (grid.m < 100) throw std::invalid_argument("fredholm_mgf: grid order must be >= 100");
  if (!(grid.a < grid.b)) throw std::invalid_argument("fredholm_mgf: empty grid interval");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require_time_in_horizon(ctx, times[i], "fredholm_mgf");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::invalid_argument("fredholm_mgf: times must be strictly increasing");
  }

  const double coarse = fredholm_at_order(ctx, times, chi, grid, grid.m);
  const double fine = fredholm_at_order(ctx, times, chi, grid, 2 * grid.m);
  const double delta = std::abs(fine - coarse);
  if (delta > 1e-6 * std::max(1.0, std::abs(coarse)))
    throw QuadratureOrderTooLow("fredholm_mgf: doubling the Nystrom grid moved the result");
  return MgfResult{coarse, delta};
}

namespace {

double contour_kernel_with_nodes(const KernelContext& ctx, std::size_t n_nodes, double s,
                                 double x, double t, double y) {
  const Configuration& xi = ctx.xi();
  const auto& pts = xi.points();
  const std::size_t n = pts.size();
  const ContourSpec& gamma = ctx.contour();
  const auto& gh = ctx.gh_rule();
  const std::size_t q_count = gh.size();

  // The z-integrand is (prod_v (1 - (iw - z)/(x_v - z)) - 1) / (iw - z):
  // subtracting 1 removes the off-support pole at z = iw, whose closed-contour
  // integral around the support vanishes, and leaves the divided difference
  //   (Q(zeta) - Q(z)) / ((zeta - z) Q(z)),  Q(zeta) = prod_v (x_v - zeta),
  // whose only poles are the support points. The w-integral runs on the line
  // shifted by -iy, where p_{0,t}(w, -iy) becomes the standard normal weight;
  // there it is a Gauss-Hermite sum over zeta = y + i sqrt(t) h.
  const double scale = std::sqrt(t);
  std::vector<Complex> zeta(q_count);
  for (std::size_t q = 0; q < q_count; ++q) zeta[q] = Complex(y, scale * gh.nodes[q]);

  // prefix[q][k] = prod_{j<k} (zeta_q - x_j); suffix per contour node below.
  std::vector<std::vector<Complex>> prefix(q_count, std::vector<Complex>(n + 1));
  for (std::size_t q = 0; q < q_count; ++q) {
    prefix[q][0] = 1.0;
    for (std::size_t k = 0; k < n; ++k) prefix[q][k + 1] = prefix[q][k] * (zeta[q] - pts[k]);
  }
  const double parity = (n % 2 == 0) ? 1.0 : -1.0;

  // One pass over the upper half circle; the lower half is the exact
  // conjugate (real center, conjugate-symmetric zeta set), so each pair
  // contributes 2 Re(term) and the imaginary parts cancel identically.
  if (n_nodes < 4 || n_nodes % 2 != 0)
    throw std::invalid_argument("contour_kernel_K: node count must be even and at least 4");
  std::vector<Complex> suffix(n + 1);
  auto term_at = [&](Complex dir) {
    const Complex z = gamma.center + gamma.radius * dir;
    suffix[n] = 1.0;
    for (std::size_t k = n; k-- > 0;) suffix[k] = suffix[k + 1] * (z - pts[k]);
    const Complex q_of_z = parity * suffix[0];
    Complex inner(0.0, 0.0);
    for (std::size_t q = 0, r = q_count - 1; q <= r; ++q, --r) {
      Complex dd_lo(0.0, 0.0);  // (Q(zeta_q) - Q(z)) / (zeta_q - z), product form
      for (std::size_t k = 0; k < n; ++k) dd_lo += prefix[q][k] * suffix[k + 1];
      if (q == r) {
        inner += gh.weights[q] * dd_lo;
        break;
      }
      Complex dd_hi(0.0, 0.0);
      for (std::size_t k = 0; k < n; ++k) dd_hi += prefix[r][k] * suffix[k + 1];
      inner += gh.weights[q] * (dd_lo + dd_hi);
    }
    return dir * heat_kernel(0.0, s, z, x) * (parity * inner / q_of_z);
  };

  Complex acc = term_at(Complex(1.0, 0.0)) + term_at(Complex(-1.0, 0.0));
  for (std::size_t c = 1; c < n_nodes / 2; ++c) {
    const double theta = 2.0 * kPi * static_cast<double>(c) / static_cast<double>(n_nodes);
    const Complex f = term_at(Complex(std::cos(theta), std::sin(theta)));
    acc += f + std::conj(f);
  }
  acc *= gamma.radius / static_cast<double>(n_nodes);
  if (!(std::abs(acc.imag()) < 1e-8))
    throw std::logic_error("contour_kernel_K: imaginary residual exceeds 1e-8");
  double k = acc.real();
  if (s > t) k -= heat_kernel(t, s, y, x);
  return k;
}

}  // namespace

double contour_kernel_K(const KernelContext& ctx, double s, double x, double t, double y) {
  require_time_in_horizon(ctx, s, "contour_kernel_K");
  require_time_in_horizon(ctx, t, "contour_kernel_K");
  const ContourSpec& gamma = ctx.contour();
  for (double v : ctx.xi().points()) {
    const double dist = std::abs(std::abs(Complex(v, 0.0) - gamma.center) - gamma.radius);
    if (dist < 1e-3)
      throw ContourTooClose("contour_kernel_K: contour within 1e-3 of support point " +
                            std::to_string(v));
  }
  const double k = contour_kernel_with_nodes(ctx, gamma.n_nodes, s, x, t, y);
  if (ctx.options().refine_check) {
    const double k_fine = contour_kernel_with_nodes(ctx, 2 * gamma.n_nodes, s, x, t, y);
    if (std::abs(k_fine - k) > 1e-8 * std::max(1.0, std::abs(k)))
      throw QuadratureOrderTooLow("contour_kernel_K: doubling the contour nodes moved the result");
  }
  return k;
}

}  // namespace dyson
