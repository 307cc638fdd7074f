#include "iltm/specfun.hpp"

#include "iltm/error.hpp"

#include <cmath>
#include <limits>

namespace iltm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Below this the ascending series is used, above it Steed's continued
// fraction. Both stay within a few ulp on either side of the switch.
constexpr double kSeriesLimit = 1.5;

void require_positive(double x, const char* name) {
  if (!(x > 0)) throw DomainError(std::string(name) + " requires x > 0");
}

// Ascending series, valid for small x:
//   K0 = -(ln(x/2) + gamma) I0 + sum_k H_k t^k / (k!)^2
//   x K1 = 1 + x ln(x/2) I1 - (x^2/4) sum_k (psi(k+1) + psi(k+2)) t^k / (k!(k+1)!)
// with t = x^2/4.
struct SmallSeries {
  double k0;
  double xk1;
};

SmallSeries small_series(double x) {
  const double t = 0.25 * x * x;
  const double log_half = std::log(0.5 * x);

  double term0 = 1;  // t^k/(k!)^2
  double i0 = 1;
  double harmonic = 0;
  double k0_sum = 0;

  double term1 = 1;  // t^k/(k!(k+1)!)
  double i1_over_half_x = 1;
  double psi_k1 = -kEulerGamma;      // psi(k+1)
  double psi_k2 = 1 - kEulerGamma;   // psi(k+2)
  double k1_sum = psi_k1 + psi_k2;

  for (int k = 1; k < 60; ++k) {
    term0 *= t / (static_cast<double>(k) * k);
    harmonic += 1.0 / k;
    i0 += term0;
    k0_sum += harmonic * term0;

    term1 *= t / (static_cast<double>(k) * (k + 1));
    psi_k1 = psi_k2;
    psi_k2 += 1.0 / (k + 1);
    i1_over_half_x += term1;
    k1_sum += (psi_k1 + psi_k2) * term1;

    if (term0 < kEps * 1e-2 * i0 && term1 < kEps * 1e-2 * i1_over_half_x) break;
  }
  const double i1 = 0.5 * x * i1_over_half_x;
  return {
      .k0 = -(log_half + kEulerGamma) * i0 + k0_sum,
      .xk1 = 1 + x * log_half * i1 - t * k1_sum,
  };
}

// Steed's method (continued fraction CF2) for order 0, returning the
// exponentially scaled pair e^x K0, e^x K1.
struct ScaledPair {
  double k0;
  double k1;
};

ScaledPair steed_scaled(double x) {
  double b = 2 * (1 + x);
  double d = 1 / b;
  double h = d;
  double delh = d;
  double q1 = 0;
  double q2 = 1;
  const double a1 = 0.25;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1 + q * delh;
  for (int i = 1; i < 100000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2;
    d = 1 / (b + a * d);
    delh = (b * d - 1) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps * 0.5) break;
  }
  h *= a1;
  const double k0 = std::sqrt(kPi / (2 * x)) / s;
  return {k0, k0 * (x + 0.5 - h) / x};
}

}  // namespace

double bessel_k0(double x) {
  require_positive(x, "bessel_k0");
  if (x <= kSeriesLimit) return small_series(x).k0;
  if (x > 745) return 0;
  return steed_scaled(x).k0 * std::exp(-x);
}

double bessel_k1(double x) {
  require_positive(x, "bessel_k1");
  if (x <= kSeriesLimit) return small_series(x).xk1 / x;
  if (x > 745) return 0;
  return steed_scaled(x).k1 * std::exp(-x);
}

double x_bessel_k1(double x) {
  if (x < 0) throw DomainError("x_bessel_k1 requires x >= 0");
  if (x == 0) return 1;
  if (x <= kSeriesLimit) return small_series(x).xk1;
  if (x > 745) return 0;
  return x * steed_scaled(x).k1 * std::exp(-x);
}

double bessel_k0_scaled(double x) {
  require_positive(x, "bessel_k0_scaled");
  if (x <= kSeriesLimit) return small_series(x).k0 * std::exp(x);
  return steed_scaled(x).k0;
}

double bessel_k1_scaled(double x) {
  require_positive(x, "bessel_k1_scaled");
  if (x <= kSeriesLimit) return small_series(x).xk1 / x * std::exp(x);
  return steed_scaled(x).k1;
}

double bessel_i0_scaled(double x) {
  if (x < 0) throw DomainError("bessel_i0 requires x >= 0");
  if (x <= 30) {
    const double t = 0.25 * x * x;
    double term = 1;
    double sum = 1;
    for (int k = 1; k < 500; ++k) {
      term *= t / (static_cast<double>(k) * k);
      sum += term;
      if (term < kEps * 1e-2 * sum) break;
    }
    return sum * std::exp(-x);
  }
  // I0(x) ~ e^x / sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k)
  double term = 1;
  double sum = 1;
  for (int k = 1; k < 2 * x; ++k) {
    const double next = term * (2.0 * k - 1) * (2.0 * k - 1) / (8.0 * k * x);
    if (next >= term) break;
    term = next;
    sum += term;
    if (term < kEps * 1e-2 * sum) break;
  }
  return sum / std::sqrt(2 * kPi * x);
}

double bessel_i0(double x) {
  const double scaled = bessel_i0_scaled(x);
  if (x > 709) return std::numeric_limits<double>::infinity();
  return scaled * std::exp(x);
}

double trigamma(double x) {
  if (!(x > 0)) throw DomainError("trigamma requires x > 0");
  // Shift by recurrence psi_1(x) = psi_1(x+1) + 1/x^2 to x >= 20, then use
  // psi_1(x) ~ 1/x + 1/(2x^2) + sum_k B_2k / x^(2k+1).
  double shift = 0;
  while (x < 20) {
    shift += 1 / (x * x);
    x += 1;
  }
  static constexpr double kBernoulli[] = {
      1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6, -3617.0 / 510,
  };
  const double inv = 1 / x;
  const double inv2 = inv * inv;
  double power = inv * inv2;  // x^-(2k+1), k = 1
  double tail = 0;
  for (double b : kBernoulli) {
    tail += b * power;
    power *= inv2;
  }
  return shift + (inv + 0.5 * inv2 + tail);
}

double zeta2() { return kPi * kPi / 6; }

double zeta3() {
  // zeta(3) = (5/2) sum_{n>=1} (-1)^(n+1) / (n^3 binom(2n, n))
  double sum = 0;
  double binom = 1;
  for (int n = 1; n < 40; ++n) {
    binom *= 2.0 * (2 * n - 1) / n;
    const double term = 1 / (static_cast<double>(n) * n * n * binom);
    sum += (n % 2 == 1) ? term : -term;
    if (term < kEps * 1e-3) break;
  }
  return 2.5 * sum;
}

double zeta_f() { return (trigamma(1.0 / 3) - trigamma(2.0 / 3)) / 9; }

ZetaFSeries zeta_f_series(std::int64_t last_index) {
  if (last_index < 0) throw InvalidArgument("last_index must be nonnegative");
  // smallest terms first
  double sum = 0;
  double compensation = 0;
  for (std::int64_t p = last_index; p >= 0; --p) {
    const double a = 1.0 + 3.0 * static_cast<double>(p);
    const double b = 2.0 + 3.0 * static_cast<double>(p);
    const double term = (b - a) * (b + a) / (a * a * b * b);
    const double y = term - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
  }
  // terms are positive and decreasing, so the tail lies between the
  // integrals of the summand over [N+1, inf) and [N, inf)
  auto tail_integral = [](double from) { return 1 / (3 * (3 * from + 1)) - 1 / (3 * (3 * from + 2)); };
  const auto n = static_cast<double>(last_index);
  return {sum, tail_integral(n + 1), tail_integral(n)};
}

}  // namespace iltm
