#pragma once

// Exact bit error rate of D-AF DBPSK with fixed combining weights over
// time-varying Rayleigh fading.
//
// Conditioned on lambda = |h2|^2 the weighted decision variables of the two
// branches have two-sided exponential densities, which gives a closed-form
// conditional BER
//   Pb(E | lambda) = c0/b0 + c0 d2^2 / (b0 b2 (d2 - c0)) + d0 c2^2 / (b0 b2 (d0 - c2)).
// Averaging over lambda ~ Exp(sigma_2^2) gives Pb(E) = I1 + I2 + I3 with
// I3(alpha0, alpha) = -I2(-alpha0, -alpha).
//
// The I2 integrand is a ratio of quadratics in lambda,
//   B3 (lambda + z)^2 / ((lambda + p) (lambda + r)),
// and is integrated exactly by partial fractions, giving two exponential
// integral terms. ber_i2_btilde() keeps only the leading large-lambda behaviour
// of that ratio, (lambda + B1) / (lambda + B2), which yields the familiar
// single-E1 expression in B1, B2, B3; it is an approximation and is kept for
// comparison only.

#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "daf/dafsys.hpp"
#include "daf/errors.hpp"
#include "daf/special_math.hpp"

namespace daf {

/// The resolved quantities the BER expressions consume.
struct LinkBudget {
  double n0 = 1.0;
  double rho0 = 0.0;         // P0 sigma_0^2 / N0
  double rho1 = 0.0;         // P0 sigma_1^2 / N0
  double amp = 1.0;          // relay gain A
  double rd_variance = 1.0;  // sigma_2^2

  static LinkBudget from(const SystemParams& p) {
    return {p.n0, p.rho0(), p.rho1(), p.amp_factor, p.variances.rd};
  }
};

struct BerInputs {
  SystemParams params;
  WeightPair weights;
  double alpha0 = 1.0;
  double alpha = 1.0;

  static BerInputs from(const SystemParams& params, const WeightPair& weights) {
    return {params, weights, params.alphas.a0, params.alpha()};
  }

  void validate() const {
    params.validate();
    weights.validate();
    if (!(alpha0 > 0.0 && alpha0 <= 1.0) || !(alpha > 0.0 && alpha <= 1.0)) {
      throw ArgumentError("BerInputs: correlations must lie in (0, 1]");
    }
  }
};

/// Parameters of the two-sided exponential densities of the weighted decision
/// variables; the cascaded-branch values belong to one lambda.
struct PdfParams {
  double b0, c0, d0;
  double b2, c2, d2;
};

inline PdfParams pdf_params(double lambda, const LinkBudget& lb, const WeightPair& w, double alpha0,
                            double alpha) {
  PdfParams p{};
  p.b0 = w.w0 * lb.n0 * (1.0 + lb.rho0);
  p.c0 = 0.5 * w.w0 * lb.n0 * (1.0 + (1.0 - alpha0) * lb.rho0);
  p.d0 = -0.5 * w.w0 * lb.n0 * (1.0 + (1.0 + alpha0) * lb.rho0);
  const double a2l = lb.amp * lb.amp * lambda;
  const double sigma_z2 = lb.n0 * (1.0 + a2l);
  const double rho2 = lb.rho1 * a2l / (1.0 + a2l);
  p.b2 = w.w2 * sigma_z2 * (1.0 + rho2);
  p.c2 = 0.5 * w.w2 * sigma_z2 * (1.0 + (1.0 - alpha) * rho2);
  p.d2 = -0.5 * w.w2 * sigma_z2 * (1.0 + (1.0 + alpha) * rho2);
  return p;
}

/// Density of the weighted direct-branch decision variable.
inline double direct_branch_pdf(double beta, const PdfParams& p) {
  return beta <= 0.0 ? std::exp(beta / p.c0) / p.b0 : std::exp(beta / p.d0) / p.b0;
}

/// Distribution function of the weighted cascaded-branch decision variable
/// for the lambda the parameters were built with.
inline double cascaded_branch_cdf(double beta, const PdfParams& p) {
  return beta <= 0.0 ? p.c2 / p.b2 * std::exp(beta / p.c2)
                     : 1.0 + p.d2 / p.b2 * std::exp(beta / p.d2);
}

inline double ber_i1(double alpha0, double rho0) {
  return (1.0 + (1.0 - alpha0) * rho0) / (2.0 * (1.0 + rho0));
}

/// Point-to-point DBPSK error rate in fast Rayleigh fading with lag-1
/// correlation alpha and average SNR rho.
inline double dbpsk_fast_fading_ber(double alpha, double rho) {
  return 0.5 * (1.0 + rho - alpha * rho) / (1.0 + rho);
}

inline double ber_conditional(double lambda, const LinkBudget& lb, const WeightPair& w, double alpha0,
                              double alpha) {
  if (!(lambda >= 0.0)) throw DomainError("ber_conditional: lambda must be non-negative");
  const auto p = pdf_params(lambda, lb, w, alpha0, alpha);
  return p.c0 / p.b0 + p.c0 * p.d2 * p.d2 / (p.b0 * p.b2 * (p.d2 - p.c0)) +
         p.d0 * p.c2 * p.c2 / (p.b0 * p.b2 * (p.d0 - p.c2));
}

inline double ber_conditional(double lambda, const BerInputs& in) {
  return ber_conditional(lambda, LinkBudget::from(in.params), in.weights, in.alpha0, in.alpha);
}

struct BtildeParams {
  double b1t;
  double b2t;
  double b3t;
};

inline BtildeParams btilde(const LinkBudget& lb, const WeightPair& w, double alpha0, double alpha) {
  const double a2 = lb.amp * lb.amp;
  const double rho0 = lb.rho0;
  const double rho1 = lb.rho1;
  BtildeParams t{};
  t.b1t = 2.0 / (a2 * (1.0 + (1.0 + alpha) * rho1));
  t.b2t = ((w.w2 * (2.0 + alpha) + w.w0 + w.w0 * (1.0 - alpha0) * rho0) * rho1 +
           w.w0 * (1.0 + (1.0 - alpha0) * rho0) + 2.0 * w.w2) /
          (a2 * w.w2 * (1.0 + rho1) * (1.0 + (1.0 + alpha) * rho1));
  t.b3t = -(1.0 + (1.0 - alpha0) * rho0) / (2.0 * t.b1t * a2 * (1.0 + rho0) * (1.0 + rho1));
  return t;
}

inline BtildeParams btilde(const BerInputs& in) {
  return btilde(LinkBudget::from(in.params), in.weights, in.alpha0, in.alpha);
}

namespace detail {

[[noreturn]] inline void throw_bad_e1_argument(const char* where, double arg, double alpha0,
                                               double alpha, const WeightPair& w) {
  std::ostringstream os;
  os.precision(17);
  os << where << ": exponential-integral argument " << arg << " is not positive (alpha0=" << alpha0
     << ", alpha=" << alpha << ", w0=" << w.w0 << ", w2=" << w.w2 << ")";
  throw DomainError(os.str());
}

// int_0^inf exp(-x/s)/s / (x + q) dx = e^{q/s} E1(q/s) / s
inline double exp_average_of_reciprocal(double q, double s) { return exp_scaled_e1(q / s) / s; }

}  // namespace detail

/// Single-E1 expression B3 (1 + (B1 - B2)/s e^{B2/s} E1(B2/s)), s = sigma_2^2.
/// Approximates the integrand by its first-order large-lambda form; see the
/// file comment. Not used by ber_exact.
inline double ber_i2_btilde(double alpha0, double alpha, const LinkBudget& lb, const WeightPair& w) {
  const auto t = btilde(lb, w, alpha0, alpha);
  if (!(t.b2t > 0.0)) detail::throw_bad_e1_argument("ber_i2_btilde", t.b2t, alpha0, alpha, w);
  const double s = lb.rd_variance;
  return t.b3t * (1.0 + (t.b1t - t.b2t) * detail::exp_average_of_reciprocal(t.b2t, s));
}

/// Exact I2: (c0/b0) E_lambda[ d2^2 / (b2 (d2 - c0)) ]. Accepts negated
/// correlations, as needed for I3.
inline double ber_i2(double alpha0, double alpha, const LinkBudget& lb, const WeightPair& w) {
  const double a2 = lb.amp * lb.amp;
  const double s = lb.rd_variance;
  const double k = 1.0 + (1.0 + alpha) * lb.rho1;  // growth of -d2 in lambda
  const double l = 1.0 + lb.rho1;                  // growth of b2 in lambda
  const double direct = w.w0 * (1.0 + (1.0 - alpha0) * lb.rho0);
  const double lead = -ber_i1(alpha0, lb.rho0) * k / (2.0 * l);
  const double zero = 1.0 / (a2 * k);
  const double pole_b = 1.0 / (a2 * l);
  const double pole_d = (w.w2 + direct) / (w.w2 * k * a2);
  if (!(pole_b > 0.0) || !std::isfinite(pole_b)) {
    detail::throw_bad_e1_argument("ber_i2", pole_b / s, alpha0, alpha, w);
  }
  if (!(pole_d > 0.0) || !std::isfinite(pole_d)) {
    detail::throw_bad_e1_argument("ber_i2", pole_d / s, alpha0, alpha, w);
  }

  // (x+z)^2/((x+p)(x+r)) = 1 + [phi(p) - phi(r)] / ((r - p)(x + .)) terms, with
  // phi(q) = (z - q)^2 E[1/(x+q)]. Close poles use the derivative instead.
  auto phi = [&](double q) {
    const double dz = zero - q;
    return dz * dz * detail::exp_average_of_reciprocal(q, s);
  };
  double fractions;
  const double gap = pole_d - pole_b;
  if (std::abs(gap) > 1e-5 * std::max(pole_b, pole_d)) {
    fractions = (phi(pole_b) - phi(pole_d)) / gap;
  } else {
    const double q = 0.5 * (pole_b + pole_d);
    const double dz = zero - q;
    const double g = detail::exp_average_of_reciprocal(q, s);
    const double dg = (exp_scaled_e1(q / s) - s / q) / (s * s);
    fractions = -(-2.0 * dz * g + dz * dz * dg);
  }
  return lead * (1.0 + fractions);
}

inline double ber_i3(double alpha0, double alpha, const LinkBudget& lb, const WeightPair& w) {
  return -ber_i2(-alpha0, -alpha, lb, w);
}

inline double ber_exact(const LinkBudget& lb, const WeightPair& w, double alpha0, double alpha) {
  return ber_i1(alpha0, lb.rho0) + ber_i2(alpha0, alpha, lb, w) + ber_i3(alpha0, alpha, lb, w);
}

inline double ber_i2(double alpha0, double alpha, const BerInputs& in) {
  return ber_i2(alpha0, alpha, LinkBudget::from(in.params), in.weights);
}
inline double ber_i3(double alpha0, double alpha, const BerInputs& in) {
  return ber_i3(alpha0, alpha, LinkBudget::from(in.params), in.weights);
}
inline double ber_exact(const BerInputs& in) {
  in.validate();
  return ber_exact(LinkBudget::from(in.params), in.weights, in.alpha0, in.alpha);
}

// ---- SNR-parametrized model ----

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Everything the BER depends on except the transmit power: the power split q,
/// channel statistics and the weight policy (weights are recomputed per SNR).
struct BerModel {
  Variances variances;
  Alphas alphas;
  WeightScheme scheme = SemiOpt1{};
  double q = 0.5;
  double n0 = 1.0;

  /// Inputs at total transmit SNR P/N0 given in dB.
  BerInputs at_snr_db(double snr_db) const {
    const auto params =
        SystemParams::from_total_power(db_to_linear(snr_db) * n0, q, n0, variances, alphas);
    return BerInputs::from(params, compute_weights(scheme, params));
  }
};

inline double ber_at(const BerModel& model, double snr_db) { return ber_exact(model.at_snr_db(snr_db)); }

/// High-SNR limit of the BER. Evaluated on a P/N0 ladder 100, 120, ... dB
/// until consecutive rungs differ by less than 1e-6 relative (or both are
/// numerically zero).
inline double error_floor(const BerModel& model) {
  constexpr double kStartDb = 100.0;
  constexpr double kStepDb = 20.0;
  constexpr int kMaxRungs = 11;
  constexpr double kRelTol = 1e-6;
  constexpr double kZero = 1e-15;
  double prev = ber_at(model, kStartDb);
  double cur = prev;
  for (int rung = 1; rung < kMaxRungs; ++rung) {
    prev = cur;
    cur = ber_at(model, kStartDb + kStepDb * rung);
    if (std::abs(cur - prev) <= kRelTol * std::abs(cur) || (cur < kZero && prev < kZero)) {
      return std::max(cur, 0.0);
    }
  }
  std::ostringstream os;
  os.precision(17);
  os << "error_floor: high-SNR ladder did not converge; last two rungs " << prev << " and " << cur;
  throw NumericalError(os.str(), cur, std::abs(cur - prev));
}

}  // namespace daf
