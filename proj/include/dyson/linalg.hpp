#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "dyson/numeric.hpp"

namespace dyson::linalg {

/// Determinant of a dense complex matrix (row-major, n x n) by Gaussian
/// elimination with partial pivoting on the modulus. The input is consumed.
Complex det_inplace(std::vector<Complex>& a, std::size_t n);

/// Determinant of a dense real matrix (row-major, n x n), partial pivoting.
double det_inplace(std::vector<double>& a, std::size_t n);

/// Extended-precision variant for small, poorly conditioned matrices.
std::complex<long double> det_inplace(std::vector<std::complex<long double>>& a, std::size_t n);

inline Complex det(std::vector<Complex> a, std::size_t n) { return det_inplace(a, n); }
inline double det(std::vector<double> a, std::size_t n) { return det_inplace(a, n); }

/// Eigenvalues of a Hermitian matrix (row-major, n x n) by cyclic Jacobi
/// rotations, returned in ascending order. Converged when the off-diagonal
/// Frobenius mass drops below `off_diag_tol`.
///
/// Throws EigensolverNoConvergence after `max_sweeps` full sweeps.
std::vector<double> hermitian_eigenvalues(std::vector<Complex> a, std::size_t n,
                                          double off_diag_tol = 1e-12, int max_sweeps = 100);

}  // namespace dyson::linalg
