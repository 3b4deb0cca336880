#pragma once

// Time-varying Rayleigh fading links with the mobile-to-mobile (Akki-Haber)
// correlation  phi(n) = sigma^2 J0(2 pi fa n) J0(2 pi fb n), where fa and fb
// are the normalized Dopplers of the two moving endpoints of the link.
//
// Sequences are produced by a double-ring sum-of-sinusoids generator. The
// first-order autoregressive models of a single link and of the cascaded
// (product) channel are provided for checking the analysis; the generator
// never uses them.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "daf/errors.hpp"
#include "daf/rng.hpp"
#include "daf/special_math.hpp"

namespace daf {

using cplx = std::complex<double>;

enum class LinkId : std::uint8_t { SD = 0, SR = 1, RD = 2 };

inline std::string_view to_string(LinkId id) {
  switch (id) {
    case LinkId::SD: return "SD";
    case LinkId::SR: return "SR";
    case LinkId::RD: return "RD";
  }
  return "?";
}

inline std::optional<LinkId> parse_link_id(std::string_view s) {
  if (s == "SD") return LinkId::SD;
  if (s == "SR") return LinkId::SR;
  if (s == "RD") return LinkId::RD;
  return std::nullopt;
}

/// Maximum normalized Doppler (cycles per symbol) induced by the motion of
/// Source (f0), Relay (f1) and Destination (f2).
struct NodeDopplers {
  double f0 = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;

  void validate() const {
    for (double f : {f0, f1, f2}) {
      if (!(f >= 0.0 && f < 0.5)) {
        throw ArgumentError("NodeDopplers: each normalized Doppler must lie in [0, 0.5)");
      }
    }
  }

  bool operator==(const NodeDopplers&) const = default;
};

enum class FadingCase { CaseI, CaseII, CaseIII };

inline std::string_view to_string(FadingCase c) {
  switch (c) {
    case FadingCase::CaseI: return "CaseI";
    case FadingCase::CaseII: return "CaseII";
    case FadingCase::CaseIII: return "CaseIII";
  }
  return "?";
}

inline std::optional<FadingCase> parse_fading_case(std::string_view s) {
  if (s == "CaseI") return FadingCase::CaseI;
  if (s == "CaseII") return FadingCase::CaseII;
  if (s == "CaseIII") return FadingCase::CaseIII;
  return std::nullopt;
}

// Case I: every node slow. Case II: only the Source moves. Case III: Source and
// Relay move.
inline NodeDopplers dopplers_for(FadingCase c) {
  switch (c) {
    case FadingCase::CaseI: return {0.001, 0.001, 0.001};
    case FadingCase::CaseII: return {0.02, 0.001, 0.001};
    case FadingCase::CaseIII: return {0.05, 0.02, 0.001};
  }
  throw ArgumentError("dopplers_for: unknown fading case");
}

struct DopplerPair {
  double first = 0.0;
  double second = 0.0;
  bool operator==(const DopplerPair&) const = default;
};

struct LinkSpec {
  LinkId id = LinkId::SD;
  double variance = 1.0;
  DopplerPair dopplers;

  void validate() const {
    if (!(variance > 0.0)) throw ArgumentError("LinkSpec: variance must be positive");
    NodeDopplers{dopplers.first, dopplers.second, 0.0}.validate();
  }

  /// Each link sees the motion of its two endpoints:
  /// SD -> (f0, f2), SR -> (f1, f0), RD -> (f2, f1).
  static LinkSpec from_nodes(LinkId id, double variance, const NodeDopplers& f) {
    f.validate();
    LinkSpec spec{id, variance, {}};
    switch (id) {
      case LinkId::SD: spec.dopplers = {f.f0, f.f2}; break;
      case LinkId::SR: spec.dopplers = {f.f1, f.f0}; break;
      case LinkId::RD: spec.dopplers = {f.f2, f.f1}; break;
    }
    spec.validate();
    return spec;
  }
};

inline double theoretical_acf(const LinkSpec& link, int lag) {
  if (lag < 0) throw ArgumentError("theoretical_acf: lag must be non-negative");
  const double n = static_cast<double>(lag);
  return link.variance * bessel_j0(2.0 * std::numbers::pi * link.dopplers.first * n) *
         bessel_j0(2.0 * std::numbers::pi * link.dopplers.second * n);
}

/// Lag-1 autocorrelation coefficient of a link (phi(1) / sigma^2).
inline double lag1_alpha(const LinkSpec& link) { return theoretical_acf(link, 1) / link.variance; }

struct FadingProcess {
  LinkSpec link;
  std::vector<cplx> samples;
  std::uint64_t seed = 0;
};

/// Double-ring sum-of-sinusoids generator. Every (n, m) pair of scatterers on
/// the two rings contributes one tone at fa cos(a_n) + fb cos(b_m) with an
/// independent uniform phase; ring angles are evenly spaced with a random
/// rotation per realization. The stream is continuous across fill() calls.
class SosFadingGenerator {
 public:
  static constexpr int kScatterersPerRing = 16;

  SosFadingGenerator(const LinkSpec& link, std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed));
    init(link, rng);
  }

  /// Draws the realization from a caller-owned engine.
  SosFadingGenerator(const LinkSpec& link, std::mt19937_64& rng) { init(link, rng); }

  const LinkSpec& link() const { return link_; }
  std::size_t tone_count() const { return freq_.size(); }

  void fill(std::span<cplx> out) {
    const std::size_t count = freq_.size();
    double* re = re_.data();
    double* im = im_.data();
    const double* rr = rot_re_.data();
    const double* ri = rot_im_.data();
    for (auto& sample : out) {
      if (since_anchor_ == kAnchorInterval) anchor();
      double acc_re[4] = {0.0, 0.0, 0.0, 0.0};
      double acc_im[4] = {0.0, 0.0, 0.0, 0.0};
      std::size_t i = 0;
      for (; i + 4 <= count; i += 4) {
        for (std::size_t l = 0; l < 4; ++l) {
          acc_re[l] += re[i + l];
          acc_im[l] += im[i + l];
        }
      }
      for (; i < count; ++i) {
        acc_re[0] += re[i];
        acc_im[0] += im[i];
      }
      sample = cplx((acc_re[0] + acc_re[1]) + (acc_re[2] + acc_re[3]),
                    (acc_im[0] + acc_im[1]) + (acc_im[2] + acc_im[3]));
      for (std::size_t j = 0; j < count; ++j) {
        const double nr = re[j] * rr[j] - im[j] * ri[j];
        const double ni = re[j] * ri[j] + im[j] * rr[j];
        re[j] = nr;
        im[j] = ni;
      }
      ++index_;
      ++since_anchor_;
    }
  }

 private:
  void init(const LinkSpec& link, std::mt19937_64& rng) {
    link_ = link;
    link_.validate();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double two_pi = 2.0 * std::numbers::pi;

    // A static endpoint collapses its ring to a single constant phasor.
    const bool static_a = link_.dopplers.first == 0.0;
    const bool static_b = link_.dopplers.second == 0.0;
    if (static_a && static_b) {
      const cplx h = ComplexGaussian(link_.variance)(rng);
      freq_.assign(1, 0.0);
      phase_.assign(1, std::arg(h));
      amp_.assign(1, std::abs(h));
      rot_re_.assign(1, 1.0);
      rot_im_.assign(1, 0.0);
    } else {
      const std::size_t na = static_a ? 1 : kScatterersPerRing;
      const std::size_t nb = static_b ? 1 : kScatterersPerRing;
      const double rot_a = unit(rng);
      const double rot_b = unit(rng);
      std::vector<double> fa(na), fb(nb);
      std::vector<cplx> ra(na), rb(nb);
      for (std::size_t n = 0; n < na; ++n) {
        fa[n] = link_.dopplers.first * std::cos(two_pi * (n + rot_a) / na);
        ra[n] = std::polar(1.0, two_pi * fa[n]);
      }
      for (std::size_t m = 0; m < nb; ++m) {
        fb[m] = link_.dopplers.second * std::cos(two_pi * (m + rot_b) / nb);
        rb[m] = std::polar(1.0, two_pi * fb[m]);
      }
      const std::size_t count = na * nb;
      freq_.resize(count);
      phase_.resize(count);
      phase_step_.resize(count);
      amp_.assign(count, std::sqrt(link_.variance / static_cast<double>(count)));
      rot_re_.resize(count);
      rot_im_.resize(count);
      // Initial phases are uniform on a grid of kPhaseSteps points; all their
      // moments below that order match a continuous uniform phase, and five
      // phases come out of one engine draw.
      std::uint64_t bits = 0;
      int left = 0;
      for (std::size_t n = 0; n < na; ++n) {
        for (std::size_t m = 0; m < nb; ++m) {
          const std::size_t i = n * nb + m;
          freq_[i] = fa[n] + fb[m];
          if (left == 0) {
            bits = rng();
            left = 5;
          }
          phase_step_[i] = static_cast<std::uint32_t>(bits & (kPhaseSteps - 1));
          phase_[i] = two_pi * static_cast<double>(phase_step_[i]) / kPhaseSteps;
          bits >>= 12;
          --left;
          const cplx r = ra[n] * rb[m];
          rot_re_[i] = r.real();
          rot_im_[i] = r.imag();
        }
      }
    }
    re_.resize(freq_.size());
    im_.resize(freq_.size());
    anchor();
  }

  // Phasors advance by complex rotation; they are recomputed exactly every
  // kAnchorInterval samples so rounding never accumulates.
  static constexpr std::uint64_t kAnchorInterval = 4096;

  static constexpr std::uint64_t kPhaseSteps = 4096;

  void anchor() {
    const double two_pi = 2.0 * std::numbers::pi;
    if (index_ == 0 && !phase_step_.empty()) {
      const auto& table = phase_table();
      for (std::size_t i = 0; i < freq_.size(); ++i) {
        re_[i] = amp_[i] * table[phase_step_[i]].real();
        im_[i] = amp_[i] * table[phase_step_[i]].imag();
      }
      since_anchor_ = 0;
      return;
    }
    const double k = static_cast<double>(index_);
    for (std::size_t i = 0; i < freq_.size(); ++i) {
      const double cycles = freq_[i] * k;
      const double theta = two_pi * (cycles - std::floor(cycles)) + phase_[i];
      re_[i] = amp_[i] * std::cos(theta);
      im_[i] = amp_[i] * std::sin(theta);
    }
    since_anchor_ = 0;
  }

  static const std::vector<cplx>& phase_table() {
    static const std::vector<cplx> table = [] {
      std::vector<cplx> t(kPhaseSteps);
      for (std::size_t j = 0; j < kPhaseSteps; ++j) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / kPhaseSteps;
        t[j] = cplx(std::cos(theta), std::sin(theta));
      }
      return t;
    }();
    return table;
  }

  LinkSpec link_;
  std::vector<double> freq_;
  std::vector<double> phase_;
  std::vector<std::uint32_t> phase_step_;
  std::vector<double> amp_;
  std::vector<double> re_;
  std::vector<double> im_;
  std::vector<double> rot_re_;
  std::vector<double> rot_im_;
  std::uint64_t index_ = 0;
  std::uint64_t since_anchor_ = 0;
};

inline FadingProcess generate_fading(const LinkSpec& link, std::size_t length, std::uint64_t seed) {
  if (length == 0) throw ArgumentError("generate_fading: length must be at least 1");
  FadingProcess process{link, std::vector<cplx>(length), seed};
  SosFadingGenerator gen(link, seed);
  gen.fill(process.samples);
  return process;
}

/// Normalized empirical autocorrelation Re{sum h[k+n] h*[k]} / sum |h[k]|^2
/// (both sums averaged over their own number of terms) for lags 0..max_lag.
inline std::vector<double> empirical_acf(std::span<const cplx> h, int max_lag) {
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= h.size()) {
    throw ArgumentError("empirical_acf: need more samples than lags");
  }
  double power = 0.0;
  for (const auto& v : h) power += std::norm(v);
  power /= static_cast<double>(h.size());
  std::vector<double> acf(static_cast<std::size_t>(max_lag) + 1);
  for (int lag = 0; lag <= max_lag; ++lag) {
    const std::size_t terms = h.size() - static_cast<std::size_t>(lag);
    double acc = 0.0;
    for (std::size_t k = 0; k < terms; ++k) acc += (h[k + lag] * std::conj(h[k])).real();
    acf[static_cast<std::size_t>(lag)] = acc / static_cast<double>(terms) / power;
  }
  return acf;
}

struct Ar1Params {
  double alpha = 1.0;
  double variance = 1.0;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("Ar1Params: alpha must lie in (0, 1]");
    if (!(variance > 0.0)) throw ArgumentError("Ar1Params: variance must be positive");
  }
};

/// h[k] = alpha h[k-1] + sqrt(1 - alpha^2) e[k], with e[k] ~ CN(0, variance)
/// supplied by the caller. alpha = 0 is accepted as the memoryless limit.
inline cplx ar1_step(cplx prev, const Ar1Params& params, cplx innovation) {
  return params.alpha * prev + std::sqrt(1.0 - params.alpha * params.alpha) * innovation;
}

/// Cascaded channel h = h1 h2:
/// h[k] = alpha h[k-1] + sqrt(1 - alpha^2) h2[k-1] e1[k], alpha = alpha1 alpha2.
inline cplx cascaded_ar1_step(cplx prev_h, cplx prev_h2, double alpha, cplx innovation_e1) {
  return alpha * prev_h + std::sqrt(1.0 - alpha * alpha) * prev_h2 * innovation_e1;
}

}  // namespace daf
