#pragma once

// Modified Bessel functions of orders 0 and 1 and the zeta-type constants
// that appear in the moment formulas.

#include <cstdint>

namespace iltm {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kEulerGamma = 0.577215664901532860606512090082402431;

/// K_0(x) for x > 0; throws DomainError otherwise. Underflows to 0 for large x.
double bessel_k0(double x);

/// K_1(x) for x > 0; throws DomainError otherwise.
double bessel_k1(double x);

/// x * K_1(x), extended continuously by 1 at x = 0.
double x_bessel_k1(double x);

/// e^x K_0(x) and e^x K_1(x), usable far beyond the underflow of K_0.
double bessel_k0_scaled(double x);
double bessel_k1_scaled(double x);

/// I_0(x) for x >= 0, and e^{-x} I_0(x).
double bessel_i0(double x);
double bessel_i0_scaled(double x);

/// psi_1(x) = sum_k 1/(x+k)^2 for x > 0.
double trigamma(double x);

double zeta2();
double zeta3();

/// sum_p 1/(1+3p)^2 - 1/(2+3p)^2, via (psi_1(1/3) - psi_1(2/3)) / 9.
double zeta_f();

/// Partial sum of the defining series of zeta_f over p = 0..last_index,
/// with rigorous lower/upper bounds on the omitted tail.
struct ZetaFSeries {
  double partial_sum;
  double tail_lower;
  double tail_upper;

  double lower() const { return partial_sum + tail_lower; }
  double upper() const { return partial_sum + tail_upper; }
  double midpoint() const { return partial_sum + 0.5 * (tail_lower + tail_upper); }
};

ZetaFSeries zeta_f_series(std::int64_t last_index);

}  // namespace iltm
