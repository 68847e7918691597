#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>

namespace dyson {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Support-point coincidence tolerance: two reals closer than this are treated
// as the same configuration point.
inline constexpr double kCoincidenceTol = 1e-12;

/// Gaussian heat kernel p_{s,t}(x,y) = exp(-(y-x)^2 / 2(t-s)) / sqrt(2 pi (t-s)).
inline double heat_kernel(double s, double t, double x, double y) {
  const double dt = t - s;
  const double d = y - x;
  return std::exp(-d * d / (2.0 * dt)) / std::sqrt(2.0 * kPi * dt);
}

/// Heat kernel continued to a complex start point (the end point stays real).
inline Complex heat_kernel(double s, double t, Complex x, double y) {
  const double dt = t - s;
  const Complex d = y - x;
  return std::exp(-d * d / (2.0 * dt)) / std::sqrt(2.0 * kPi * dt);
}

// Complex product accumulator with a separate binary exponent. Long factor
// products (lattice windows reach 10^5 factors) overflow plain doubles; the
// mantissa is renormalized into [2^-512, 2^512] whenever it drifts out.
class ScaledComplex {
 public:
  ScaledComplex() : mant_(1.0, 0.0), exp2_(0) {}

  void multiply(Complex factor) {
    // A factor far outside the mantissa band is split into mantissa and
    // exponent first; otherwise the raw product could overflow before
    // renormalization gets a chance.
    const double m = std::max(std::abs(factor.real()), std::abs(factor.imag()));
    if (m > 0x1p256 || (m > 0.0 && m < 0x1p-256)) {
      int e = 0;
      std::frexp(m, &e);
      factor = {std::ldexp(factor.real(), -e), std::ldexp(factor.imag(), -e)};
      exp2_ += e;
    }
    mant_ *= factor;
    renormalize();
  }

  void multiply_real(double factor) {
    const double m = std::abs(factor);
    if (m > 0x1p256 || (m > 0.0 && m < 0x1p-256)) {
      int e = 0;
      std::frexp(m, &e);
      factor = std::ldexp(factor, -e);
      exp2_ += e;
    }
    mant_ *= factor;
    renormalize();
  }

  void divide(Complex factor) {
    mant_ /= factor;
    renormalize();
  }

  bool is_zero() const { return mant_ == Complex(0.0, 0.0); }

  /// Natural log of the modulus; -inf for an exact zero.
  double log_abs() const {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(mant_)) + static_cast<double>(exp2_) * kLn2;
  }

  /// Collapse to a plain complex. Overflows to inf / underflows to 0 when the
  /// exponent is outside double range; log_abs() stays meaningful regardless.
  Complex value() const {
    if (is_zero()) return {0.0, 0.0};
    const int e = clamp_exp(exp2_);
    return {std::ldexp(mant_.real(), e), std::ldexp(mant_.imag(), e)};
  }

  Complex mantissa() const { return mant_; }
  std::int64_t exponent2() const { return exp2_; }

  /// Ratio of two accumulators as a plain complex (exponents subtract, so the
  /// ratio is representable whenever the true quotient is).
  static Complex ratio(const ScaledComplex& num, const ScaledComplex& den) {
    Complex m = num.mant_ / den.mant_;
    const int e = clamp_exp(num.exp2_ - den.exp2_);
    return {std::ldexp(m.real(), e), std::ldexp(m.imag(), e)};
  }

 private:
  static constexpr double kLn2 = 0.6931471805599453;

  static int clamp_exp(std::int64_t e) {
    if (e > 4096) return 4096;
    if (e < -4096) return -4096;
    return static_cast<int>(e);
  }

  void renormalize() {
    const double m = std::abs(mant_);
    if (m == 0.0) {
      exp2_ = 0;
      return;
    }
    if (m > 0x1p512) {
      mant_ = {std::ldexp(mant_.real(), -512), std::ldexp(mant_.imag(), -512)};
      exp2_ += 512;
    } else if (m < 0x1p-512) {
      mant_ = {std::ldexp(mant_.real(), 512), std::ldexp(mant_.imag(), 512)};
      exp2_ -= 512;
    }
  }

  Complex mant_;
  std::int64_t exp2_;
};

}  // namespace dyson
