#include "dyson/entire_functions.hpp"

#include <algorithm>
#include <cmath>

#include "dyson/errors.hpp"
#include "dyson/linalg.hpp"

namespace dyson {

namespace {

// Factors are consumed in ascending |x - u| order: walk outward from u with
// two cursors over the sorted support.
template <typename FactorFn>
void for_factors_outward(const Configuration& xi, std::size_t u_idx, FactorFn&& fn) {
  const auto& pts = xi.points();
  const double u = pts[u_idx];
  std::ptrdiff_t left = static_cast<std::ptrdiff_t>(u_idx) - 1;
  std::size_t right = u_idx + 1;
  while (left >= 0 || right < pts.size()) {
    const bool take_left =
        right >= pts.size() ||
        (left >= 0 && (u - pts[static_cast<std::size_t>(left)]) <= (pts[right] - u));
    if (take_left) {
      fn(pts[static_cast<std::size_t>(left)]);
      --left;
    } else {
      fn(pts[right]);
      ++right;
    }
  }
}

}  // namespace

PhiEvaluation phi(const Configuration& xi, double u, Complex z) {
  const int idx = xi.find_index(u);
  if (idx < 0) throw NotInSupport("phi: u is not a support point");
  const double u_snap = xi[static_cast<std::size_t>(idx)];

  ScaledComplex prod;
  if (z.imag() == 0.0) {
    // Real arguments in real arithmetic: z on the support gives an exact zero
    // factor, z = u gives exact ones.
    const double zr = z.real();
    ScaledComplex p;
    for_factors_outward(xi, static_cast<std::size_t>(idx),
                        [&](double x) { p.multiply_real((x - zr) / (x - u_snap)); });
    prod = p;
  } else {
    for_factors_outward(xi, static_cast<std::size_t>(idx),
                        [&](double x) { prod.multiply((x - z) / (x - u_snap)); });
  }
  return PhiEvaluation{prod.value(), prod.log_abs()};
}

PhiMatrix phi_matrix(const Configuration& xi, std::span<const Complex> z) {
  const std::size_t n = xi.size();
  if (z.size() != n)
    throw DimensionMismatch("phi_matrix: z has length " + std::to_string(z.size()) +
                            ", expected " + std::to_string(n));
  PhiMatrix m;
  m.n = n;
  m.u = xi.points();
  m.z.assign(z.begin(), z.end());
  m.entries.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.entries[i * n + j] = phi(xi, xi[i], z[j]).value;
  return m;
}

Complex det_martingale(const PhiMatrix& m) {
  std::vector<Complex> a = m.entries;
  return linalg::det_inplace(a, m.n);
}

Complex det_martingale(const Configuration& xi, std::span<const Complex> z) {
  const std::size_t n = xi.size();
  if (n == 1) {
    if (z.size() != 1) throw DimensionMismatch("det_martingale: z has wrong length");
    return phi(xi, xi[0], z[0]).value;  // empty product, always 1
  }
  if (z.size() != n)
    throw DimensionMismatch("det_martingale: z has length " + std::to_string(z.size()) +
                            ", expected " + std::to_string(n));
  if (n > 512) return det_martingale(phi_matrix(xi, z));

  // Ratios h(z)/h(u) reach 1e12 at desk scale and the matrix condition eats
  // eight digits of double; the whole determinant path runs in long double.
  using CLD = std::complex<long double>;
  const auto& pts = xi.points();
  std::vector<CLD> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (z[j].imag() == 0.0) {
        const long double zr = z[j].real();
        long double prod = 1.0L;
        for_factors_outward(xi, i, [&](double x) {
          prod *= (static_cast<long double>(x) - zr) / (x - pts[i]);
        });
        m[i * n + j] = prod;
      } else {
        const CLD zj(z[j].real(), z[j].imag());
        CLD prod = 1.0L;
        for_factors_outward(xi, i, [&](double x) {
          prod *= (CLD(x, 0.0L) - zj) / CLD(x - pts[i], 0.0L);
        });
        m[i * n + j] = prod;
      }
    }
  }
  const CLD det = linalg::det_inplace(m, n);
  return {static_cast<double>(det.real()), static_cast<double>(det.imag())};
}

std::vector<Complex> phi_truncation_sequence(const InfiniteConfigSpec& spec, double u, Complex z,
                                             const std::vector<double>& L_list) {
  std::vector<Complex> out;
  out.reserve(L_list.size());
  for (double L : L_list) out.push_back(phi(restrict(spec, L), u, z).value);
  return out;
}

GrowthBoundResult growth_bound_check(const Configuration& xi, double a, Complex z,
                                     const GrowthBoundConstants& constants) {
  if (std::abs(Complex(a, 0.0) - z) < 1e-12)
    throw DivisionGuard("growth_bound_check: z coincides with a");
  const int m0 = xi.multiplicity_at_zero();
  if (m0 > 0 && std::abs(a) < 1e-12 && xi.find_index(a) < 0)
    throw DivisionGuard("growth_bound_check: a at the origin without being the origin point");

  const PhiEvaluation pe = phi(xi, a, z);
  const double lhs = std::exp(pe.log_magnitude);

  const double az = std::abs(Complex(a, 0.0) - z);
  // |z/a|^{xi({0})} |a/(a-z)| combined so the a -> 0 cancellation is explicit.
  const double tail = (m0 > 0 ? std::abs(z) : std::abs(a)) / az;
  const double rhs =
      constants.C *
      std::exp(constants.c * (std::pow(std::abs(a), constants.theta) +
                              std::pow(std::abs(z), constants.theta))) *
      tail;
  return GrowthBoundResult{lhs, rhs, lhs <= rhs};
}

std::vector<std::vector<Complex>> phi_batch(const Configuration& xi,
                                            std::span<const std::size_t> label_indices,
                                            std::span<const Complex> zeta) {
  const auto& pts = xi.points();
  const std::size_t n = pts.size();

  // Per-label denominators D_v = prod_{k != iv} (x_k - x_iv), in scaled form.
  // Factors run in support index order, the same order as the shared numerator
  // product below, so an exact on-label hit divides out to exactly 1.
  std::vector<ScaledComplex> denom(label_indices.size());
  for (std::size_t li = 0; li < label_indices.size(); ++li) {
    const std::size_t iv = label_indices[li];
    ScaledComplex d;
    for (std::size_t k = 0; k < n; ++k)
      if (k != iv) d.multiply(Complex(pts[k], 0.0) - Complex(pts[iv], 0.0));
    denom[li] = d;
  }

  std::vector<std::vector<Complex>> out(label_indices.size(),
                                        std::vector<Complex>(zeta.size()));
  for (std::size_t zi = 0; zi < zeta.size(); ++zi) {
    const Complex zt = zeta[zi];
    // Shared full-support product prod_k (x_k - zeta); an exact hit on a
    // support point is factored out so the per-label division stays clean.
    ScaledComplex q;
    std::ptrdiff_t zero_idx = -1;
    for (std::size_t k = 0; k < n; ++k) {
      const Complex f = Complex(pts[k], 0.0) - zt;
      if (f == Complex(0.0, 0.0)) {
        zero_idx = static_cast<std::ptrdiff_t>(k);
        continue;
      }
      q.multiply(f);
    }
    for (std::size_t li = 0; li < label_indices.size(); ++li) {
      const std::size_t iv = label_indices[li];
      if (zero_idx >= 0) {
        out[li][zi] = (static_cast<std::size_t>(zero_idx) == iv)
                          ? ScaledComplex::ratio(q, denom[li])
                          : Complex(0.0, 0.0);
        continue;
      }
      ScaledComplex d = denom[li];
      d.multiply(Complex(pts[iv], 0.0) - zt);
      out[li][zi] = ScaledComplex::ratio(q, d);
    }
  }
  return out;
}

}  // namespace dyson
