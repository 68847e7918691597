#include "dyson/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "dyson/errors.hpp"

namespace dyson::linalg {

namespace {

template <typename Scalar>
Scalar det_lu(std::vector<Scalar>& a, std::size_t n) {
  if (n == 0) return Scalar{1};
  Scalar det{1};
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::abs(a[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = std::abs(a[i * n + k]);
      if (m > best) {
        best = m;
        pivot = i;
      }
    }
    if (best == 0.0) return Scalar{0};
    if (pivot != k) {
      for (std::size_t j = k; j < n; ++j) std::swap(a[k * n + j], a[pivot * n + j]);
      det = -det;
    }
    const Scalar akk = a[k * n + k];
    det *= akk;
    for (std::size_t i = k + 1; i < n; ++i) {
      const Scalar f = a[i * n + k] / akk;
      if (f == Scalar{0}) continue;
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
    }
  }
  return det;
}

double off_diag_frobenius(const std::vector<Complex>& a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += std::norm(a[i * n + j]);
  return std::sqrt(s);
}

}  // namespace

Complex det_inplace(std::vector<Complex>& a, std::size_t n) { return det_lu(a, n); }

double det_inplace(std::vector<double>& a, std::size_t n) { return det_lu(a, n); }

std::complex<long double> det_inplace(std::vector<std::complex<long double>>& a, std::size_t n) {
  return det_lu(a, n);
}

std::vector<double> hermitian_eigenvalues(std::vector<Complex> a, std::size_t n,
                                          double off_diag_tol, int max_sweeps) {
  std::vector<double> eig(n);
  if (n == 0) return eig;
  if (n == 1) {
    eig[0] = a[0].real();
    return eig;
  }

  auto at = [&](std::size_t i, std::size_t j) -> Complex& { return a[i * n + j]; };

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_diag_frobenius(a, n) < off_diag_tol) {
      for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i).real();
      std::sort(eig.begin(), eig.end());
      return eig;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = at(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        // Unitary 2x2 rotation zeroing the (p,q) entry: factor out the phase
        // of a_pq, then it is the classical real Jacobi rotation.
        const Complex phase = apq / mag;
        const double app = at(p, p).real();
        const double aqq = at(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Complex sp = s * phase;  // applied to column q against column p

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = at(k, p);
          const Complex akq = at(k, q);
          at(k, p) = c * akp - std::conj(sp) * akq;
          at(k, q) = sp * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = at(p, k);
          const Complex aqk = at(q, k);
          at(p, k) = c * apk - sp * aqk;
          at(q, k) = std::conj(sp) * apk + c * aqk;
        }
        // Clean the rotated pair: exact Hermiticity of the 2x2 block.
        at(p, q) = 0.0;
        at(q, p) = 0.0;
        at(p, p) = at(p, p).real();
        at(q, q) = at(q, q).real();
      }
    }
  }
  if (off_diag_frobenius(a, n) < off_diag_tol) {
    for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i).real();
    std::sort(eig.begin(), eig.end());
    return eig;
  }
  throw EigensolverNoConvergence("hermitian_eigenvalues: off-diagonal mass did not converge");
}

}  // namespace dyson::linalg
