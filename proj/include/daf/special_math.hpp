#pragma once

// Special functions used by the fading model and the closed-form BER:
// the Bessel function J0 and the exponential integral E1.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "daf/errors.hpp"

namespace daf {

namespace detail {

inline void require_finite(double x, const char* fn) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(fn) + ": argument must be finite");
  }
}

// Below this magnitude J0 is summed from its power series; above it the
// Hankel asymptotic expansion is used. At 12 both branches are good to ~1e-11.
inline constexpr double kJ0SeriesLimit = 12.0;

inline double j0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

// Hankel expansion J0(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi), chi = x - pi/4,
// truncated at its smallest term.
inline double j0_asymptotic(double x) {
  double p = 1.0;
  double q = 0.0;
  double a = 1.0;  // a_k / x^k
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 100; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= -(odd * odd) / (8.0 * k * x);
    const double mag = std::abs(a);
    if (mag >= prev || mag < 1e-17) break;
    prev = mag;
    // (-1)^{floor(k/2)} pattern folded into the P/Q split.
    const int m = k / 2;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sign * a;
    } else {
      q += sign * a;
    }
  }
  const double chi = x - 0.25 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// E1 for 0 < x <= 1 by the convergent series -gamma - ln x - sum (-x)^k / (k k!).
inline double e1_series(double x) {
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k < 100; ++k) {
    term *= -x / static_cast<double>(k);
    const double contrib = term / static_cast<double>(k);
    sum += contrib;
    if (std::abs(contrib) < 1e-18) break;
  }
  return -kEulerGamma - std::log(x) - sum;
}

// e^x E1(x) for x > 1 by the continued fraction, evaluated with modified Lentz.
inline double e1_scaled_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return h;
  }
  throw NumericalError("exp_integral_e1: continued fraction did not converge", h, 0.0);
}

inline constexpr double kE1SeriesLimit = 1.0;

}  // namespace detail

/// Zeroth-order Bessel function of the first kind. Absolute error below 1e-10
/// for |x| <= 50. Exactly even: J0(-x) == J0(x).
inline double bessel_j0(double x) {
  detail::require_finite(x, "bessel_j0");
  const double ax = std::abs(x);
  if (ax <= detail::kJ0SeriesLimit) return detail::j0_series(ax);
  return detail::j0_asymptotic(ax);
}

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt for x > 0.
inline double exp_integral_e1(double x) {
  detail::require_finite(x, "exp_integral_e1");
  if (!(x > 0.0)) throw DomainError("exp_integral_e1: argument must be positive");
  if (x <= detail::kE1SeriesLimit) return detail::e1_series(x);
  return std::exp(-x) * detail::e1_scaled_continued_fraction(x);
}

/// e^x E1(x), finite for all x > 0 (tends to 1/x as x grows). Needed wherever
/// the closed forms pair exp(q) with E1(q) at large q.
inline double exp_scaled_e1(double x) {
  detail::require_finite(x, "exp_scaled_e1");
  if (!(x > 0.0)) throw DomainError("exp_scaled_e1: argument must be positive");
  if (x <= detail::kE1SeriesLimit) return std::exp(x) * detail::e1_series(x);
  return detail::e1_scaled_continued_fraction(x);
}

}  // namespace daf
