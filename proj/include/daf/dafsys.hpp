#pragma once

// Differential amplify-and-forward transceiver chain for DBPSK:
// differential encoding at the Source, fixed-gain amplification at the Relay,
// differential decision variables for the direct and relayed branches, fixed
// linear combining and sign detection at the Destination.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "daf/channel.hpp"
#include "daf/errors.hpp"
#include "daf/rng.hpp"

namespace daf {

using Symbol = std::int8_t;  // BPSK symbol, -1 or +1

/// Channel variances sigma_0^2 (SD), sigma_1^2 (SR), sigma_2^2 (RD).
struct Variances {
  double sd = 1.0;
  double sr = 1.0;
  double rd = 1.0;

  void validate() const {
    if (!(sd > 0.0 && sr > 0.0 && rd > 0.0)) {
      throw ArgumentError("Variances: all channel variances must be positive");
    }
  }
  bool operator==(const Variances&) const = default;
};

/// Lag-1 autocorrelations alpha_0 (SD), alpha_1 (SR), alpha_2 (RD).
struct Alphas {
  double a0 = 1.0;
  double a1 = 1.0;
  double a2 = 1.0;

  double cascaded() const { return a1 * a2; }
};

inline Alphas alphas_for(const NodeDopplers& f) {
  return {lag1_alpha(LinkSpec::from_nodes(LinkId::SD, 1.0, f)),
          lag1_alpha(LinkSpec::from_nodes(LinkId::SR, 1.0, f)),
          lag1_alpha(LinkSpec::from_nodes(LinkId::RD, 1.0, f))};
}

/// Fixed relay gain that makes the average relay transmit power equal p1.
inline double amplification_factor(double p0, double p1, double sr_variance, double n0) {
  return std::sqrt(p1 / (p0 * sr_variance + n0));
}

struct SystemParams {
  double p0 = 1.0;
  double p1 = 1.0;
  double n0 = 1.0;
  double amp_factor = 1.0;
  Variances variances;
  Alphas alphas;

  double rho0() const { return p0 * variances.sd / n0; }
  double rho1() const { return p0 * variances.sr / n0; }
  double alpha() const { return alphas.cascaded(); }

  void validate() const {
    if (!(p0 > 0.0 && p1 > 0.0 && n0 > 0.0 && amp_factor > 0.0)) {
      throw ArgumentError("SystemParams: p0, p1, n0 and the amplification factor must be positive");
    }
    variances.validate();
  }

  /// Splits total power P as p0 = qP, p1 = (1 - q)P and sets the fixed relay gain.
  static SystemParams from_total_power(double total_power, double q, double n0,
                                       const Variances& variances, const Alphas& alphas) {
    if (!(q > 0.0 && q < 1.0)) throw ArgumentError("SystemParams: power split q must lie in (0, 1)");
    SystemParams p;
    p.p0 = q * total_power;
    p.p1 = (1.0 - q) * total_power;
    p.n0 = n0;
    p.amp_factor = amplification_factor(p.p0, p.p1, variances.sr, n0);
    p.variances = variances;
    p.alphas = alphas;
    p.validate();
    return p;
  }
};

inline double amplification_factor(const SystemParams& params) {
  return amplification_factor(params.p0, params.p1, params.variances.sr, params.n0);
}

// ---- combining weights ----

struct SemiOpt1 {};
struct SemiOpt2 {};
struct EqualGain {};
struct CustomWeights {
  double w0 = 1.0;
  double w2 = 1.0;
};

using WeightScheme = std::variant<SemiOpt1, SemiOpt2, EqualGain, CustomWeights>;

inline std::string scheme_name(const WeightScheme& scheme) {
  struct Namer {
    std::string operator()(SemiOpt1) const { return "SemiOpt1"; }
    std::string operator()(SemiOpt2) const { return "SemiOpt2"; }
    std::string operator()(EqualGain) const { return "EGC"; }
    std::string operator()(const CustomWeights& c) const {
      char buf[96];
      std::snprintf(buf, sizeof buf, "Custom(%.17g;%.17g)", c.w0, c.w2);
      return buf;
    }
  };
  return std::visit(Namer{}, scheme);
}

inline std::optional<WeightScheme> parse_scheme_name(std::string_view s) {
  if (s == "SemiOpt1") return SemiOpt1{};
  if (s == "SemiOpt2") return SemiOpt2{};
  if (s == "EGC") return EqualGain{};
  return std::nullopt;
}

struct WeightPair {
  double w0 = 1.0;
  double w2 = 1.0;

  void validate() const {
    if (!(w0 > 0.0 && w2 > 0.0)) throw ArgumentError("WeightPair: weights must be strictly positive");
  }
  bool operator==(const WeightPair&) const = default;
};

inline WeightPair compute_weights(const WeightScheme& scheme, const SystemParams& params) {
  const double n0 = params.n0;
  const double gain_rd = params.amp_factor * params.amp_factor * params.variances.rd;
  WeightPair w;
  if (std::holds_alternative<SemiOpt1>(scheme)) {
    w = {1.0 / (2.0 * n0), 1.0 / (2.0 * n0 * (1.0 + gain_rd))};
  } else if (std::holds_alternative<SemiOpt2>(scheme)) {
    const double a0 = params.alphas.a0;
    const double a = params.alpha();
    const double rho0 = params.rho0();
    const double rho1 = params.rho1();
    w.w0 = a0 / (n0 * ((1.0 + a0 * a0) + (1.0 - a0 * a0) * rho0));
    w.w2 = a / (n0 * ((1.0 + a * a) * (1.0 + gain_rd) + (1.0 - a * a) * gain_rd * rho1));
  } else if (std::holds_alternative<EqualGain>(scheme)) {
    w = {1.0, 1.0};
  } else {
    const auto& c = std::get<CustomWeights>(scheme);
    w = {c.w0, c.w2};
  }
  w.validate();
  return w;
}

// ---- signal chain ----

/// x holds the information symbols, s the transmitted sequence with s[0] = 1
/// and s[k] = x[k-1] s[k-1] (x is zero-based, so x[k-1] is carried by s[k]).
struct SymbolFrame {
  std::vector<Symbol> x;
  std::vector<Symbol> s;
};

inline SymbolFrame diff_encode(std::span<const Symbol> bits) {
  if (bits.empty()) throw ArgumentError("diff_encode: empty bit sequence");
  SymbolFrame frame;
  frame.x.assign(bits.begin(), bits.end());
  frame.s.resize(bits.size() + 1);
  frame.s[0] = 1;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k] != 1 && bits[k] != -1) throw ArgumentError("diff_encode: symbols must be +1 or -1");
    frame.s[k + 1] = static_cast<Symbol>(bits[k] * frame.s[k]);
  }
  return frame;
}

/// Noise components z0 (Destination, phase I), z1 (Relay), z2 (Destination,
/// phase II), one per transmitted symbol.
struct NoiseSamples {
  std::vector<cplx> z0;
  std::vector<cplx> z1;
  std::vector<cplx> z2;

  static NoiseSamples draw(std::size_t length, double n0, std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed));
    return draw(length, n0, rng);
  }

  static NoiseSamples draw(std::size_t length, double n0, std::mt19937_64& rng) {
    ComplexGaussian cn(n0);
    NoiseSamples z;
    z.z0.resize(length);
    z.z1.resize(length);
    z.z2.resize(length);
    for (std::size_t k = 0; k < length; ++k) {
      z.z0[k] = cn(rng);
      z.z1[k] = cn(rng);
      z.z2[k] = cn(rng);
    }
    return z;
  }

  static NoiseSamples zeros(std::size_t length) {
    return {std::vector<cplx>(length), std::vector<cplx>(length), std::vector<cplx>(length)};
  }
};

struct ReceivedSignals {
  std::vector<cplx> y0;  // direct link
  std::vector<cplx> y2;  // relayed link
};

/// y0 = sqrt(P0) h0 s + z0,  y1 = sqrt(P0) h1 s + z1,  y2 = A h2 y1 + z2.
inline ReceivedSignals transmit_chain(const SymbolFrame& frame, std::span<const cplx> h0,
                                      std::span<const cplx> h1, std::span<const cplx> h2,
                                      const NoiseSamples& noise, const SystemParams& params) {
  const std::size_t n = frame.s.size();
  if (h0.size() < n || h1.size() < n || h2.size() < n) {
    throw ArgumentError("transmit_chain: fading sequences shorter than the frame");
  }
  if (noise.z0.size() < n || noise.z1.size() < n || noise.z2.size() < n) {
    throw ArgumentError("transmit_chain: noise sequences shorter than the frame");
  }
  const double sqrt_p0 = std::sqrt(params.p0);
  const double a = params.amp_factor;
  ReceivedSignals rx{std::vector<cplx>(n), std::vector<cplx>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const double s = frame.s[k];
    rx.y0[k] = sqrt_p0 * s * h0[k] + noise.z0[k];
    const cplx y1 = sqrt_p0 * s * h1[k] + noise.z1[k];
    rx.y2[k] = a * h2[k] * y1 + noise.z2[k];
  }
  return rx;
}

inline ReceivedSignals transmit_chain(const SymbolFrame& frame, const FadingProcess& h0,
                                      const FadingProcess& h1, const FadingProcess& h2,
                                      std::uint64_t noise_seed, const SystemParams& params) {
  const auto noise = NoiseSamples::draw(frame.s.size(), params.n0, noise_seed);
  return transmit_chain(frame, h0.samples, h1.samples, h2.samples, noise, params);
}

/// Re{ y*[k-1] y[k] }.
inline double decision_vars(cplx y_prev, cplx y_curr) {
  return y_prev.real() * y_curr.real() + y_prev.imag() * y_curr.imag();
}

/// Sign of w0 zeta0 + w2 zeta2; an exact zero decodes to +1.
inline Symbol combine_and_detect(double zeta0, double zeta2, const WeightPair& w) {
  const double zeta = w.w0 * zeta0 + w.w2 * zeta2;
  return zeta < 0.0 ? Symbol{-1} : Symbol{1};
}

/// Differentially detects every information symbol carried by rx.
inline std::vector<Symbol> detect_frame(const ReceivedSignals& rx, const WeightPair& w) {
  std::vector<Symbol> out;
  if (rx.y0.size() < 2) return out;
  out.reserve(rx.y0.size() - 1);
  for (std::size_t k = 1; k < rx.y0.size(); ++k) {
    out.push_back(combine_and_detect(decision_vars(rx.y0[k - 1], rx.y0[k]),
                                     decision_vars(rx.y2[k - 1], rx.y2[k]), w));
  }
  return out;
}

}  // namespace daf
