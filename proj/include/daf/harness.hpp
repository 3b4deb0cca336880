#pragma once

// Monte-Carlo BER estimation and SNR sweeps.
//
// A point is simulated as a sequence of independent blocks. Each block draws a
// fresh fading realization for the three links, transmits block_size
// differentially encoded bits continuously through it (s[0] is the reference
// symbol and is not counted) and counts bit errors. Every block has its own
// RNG stream derived from (master_seed, snr, block index), and blocks are
// accumulated in index order, so results do not depend on the worker count.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "daf/analysis.hpp"
#include "daf/channel.hpp"
#include "daf/dafsys.hpp"
#include "daf/errors.hpp"
#include "daf/rng.hpp"

namespace daf {

struct FadingSpec {
  std::string label;
  NodeDopplers dopplers;

  static FadingSpec from_case(FadingCase c) { return {std::string(to_string(c)), dopplers_for(c)}; }
};

enum class VariancePreset { Symmetric, StrongSR, StrongRD };

struct VarianceScenario {
  std::string label;
  Variances variances;

  static VarianceScenario from_preset(VariancePreset p) {
    switch (p) {
      case VariancePreset::Symmetric: return {"symmetric", {1.0, 1.0, 1.0}};
      case VariancePreset::StrongSR: return {"strong_sr", {1.0, 10.0, 1.0}};
      case VariancePreset::StrongRD: return {"strong_rd", {1.0, 1.0, 10.0}};
    }
    throw ArgumentError("VarianceScenario: unknown preset");
  }
};

/// Optimum source share of the total power for each variance preset.
inline double default_power_split(VariancePreset p) {
  switch (p) {
    case VariancePreset::Symmetric: return 0.66;
    case VariancePreset::StrongSR: return 0.54;
    case VariancePreset::StrongRD: return 0.80;
  }
  throw ArgumentError("default_power_split: unknown preset");
}

struct StoppingRule {
  std::uint64_t min_bit_errors = 100;
  std::uint64_t max_symbols = 100'000'000;
};

struct SweepConfig {
  FadingSpec fading = FadingSpec::from_case(FadingCase::CaseI);
  VarianceScenario scenario = VarianceScenario::from_preset(VariancePreset::Symmetric);
  WeightScheme weight_scheme = SemiOpt1{};
  double power_split_q = 0.66;
  std::vector<double> snr_grid_db;
  StoppingRule stopping;
  std::uint64_t master_seed = 1;
  std::size_t block_size = 10'000;
  double n0 = 1.0;

  void validate() const {
    fading.dopplers.validate();
    scenario.variances.validate();
    if (!(power_split_q > 0.0 && power_split_q < 1.0)) {
      throw ArgumentError("SweepConfig: power_split_q must lie in (0, 1)");
    }
    if (snr_grid_db.empty()) throw ArgumentError("SweepConfig: snr_grid_db must not be empty");
    for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
      if (!std::isfinite(snr_grid_db[i])) throw ArgumentError("SweepConfig: snr_grid_db must be finite");
      if (i > 0 && !(snr_grid_db[i] > snr_grid_db[i - 1])) {
        throw ArgumentError("SweepConfig: snr_grid_db must be strictly increasing");
      }
    }
    if (block_size < 1) throw ArgumentError("SweepConfig: block_size must be at least 1");
    if (stopping.min_bit_errors < 1) throw ArgumentError("SweepConfig: min_bit_errors must be at least 1");
    if (stopping.max_symbols < 1) throw ArgumentError("SweepConfig: max_symbols must be at least 1");
    if (!(n0 > 0.0)) throw ArgumentError("SweepConfig: n0 must be positive");
  }

  BerModel model() const {
    return {scenario.variances, alphas_for(fading.dopplers), weight_scheme, power_split_q, n0};
  }
};

struct BerPoint {
  double snr_db = 0.0;
  double ber_analytical = 0.0;
  double ber_simulated = 0.0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_simulated = 0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  bool truncated = false;

  /// sqrt(p (1 - p) / n) evaluated at the analytical BER.
  double binomial_std_error() const {
    if (bits_simulated == 0) return 0.0;
    return std::sqrt(ber_analytical * (1.0 - ber_analytical) / static_cast<double>(bits_simulated));
  }
};

struct SweepResult {
  SweepConfig config;
  std::vector<BerPoint> points;
  double error_floor = 0.0;
  double wall_time_s = 0.0;
};

/// Wilson score interval for k successes in n trials.
inline std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n,
                                                 double z = 1.959963984540054) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return {k == 0 ? 0.0 : std::max(0.0, center - half), k == n ? 1.0 : std::min(1.0, center + half)};
}

struct BlockOutcome {
  std::uint64_t bit_errors = 0;
  std::uint64_t bits = 0;
};

/// Transmits one block of `bits` information symbols through a fresh fading
/// realization and counts detection errors.
inline BlockOutcome simulate_block(const NodeDopplers& dopplers, const SystemParams& params,
                                   const WeightPair& weights, std::size_t bits, std::uint64_t seed) {
  const std::size_t n = bits + 1;
  std::mt19937_64 rng(mix_seed(seed));
  std::vector<cplx> h0(n), h1(n), h2(n);
  SosFadingGenerator(LinkSpec::from_nodes(LinkId::SD, params.variances.sd, dopplers), rng).fill(h0);
  SosFadingGenerator(LinkSpec::from_nodes(LinkId::SR, params.variances.sr, dopplers), rng).fill(h1);
  SosFadingGenerator(LinkSpec::from_nodes(LinkId::RD, params.variances.rd, dopplers), rng).fill(h2);

  std::vector<Symbol> x(bits);
  for (auto& b : x) b = (rng() >> 63) ? Symbol{1} : Symbol{-1};
  const auto frame = diff_encode(x);
  const auto noise = NoiseSamples::draw(n, params.n0, rng);
  const auto rx = transmit_chain(frame, h0, h1, h2, noise, params);
  const auto decided = detect_frame(rx, weights);

  BlockOutcome out;
  out.bits = bits;
  for (std::size_t k = 0; k < bits; ++k) out.bit_errors += decided[k] != x[k];
  return out;
}

inline unsigned default_worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

inline BerPoint simulate_point(const SweepConfig& config, double snr_db, unsigned workers = 1) {
  config.validate();
  workers = std::max(1u, workers);
  const auto model = config.model();
  const auto inputs = model.at_snr_db(snr_db);
  const SystemParams& params = inputs.params;

  BerPoint point;
  point.snr_db = snr_db;
  point.ber_analytical = ber_exact(inputs);

  const std::uint64_t point_key = std::bit_cast<std::uint64_t>(snr_db);
  const std::uint64_t block_bits = config.block_size;
  const std::uint64_t max_blocks = std::max<std::uint64_t>(1, config.stopping.max_symbols / block_bits);

  std::uint64_t next_block = 0;
  bool done = false;
  std::vector<BlockOutcome> wave;
  while (!done) {
    const std::uint64_t count = std::min<std::uint64_t>(workers, max_blocks - next_block);
    wave.assign(count, {});
    auto run = [&](std::uint64_t i) {
      wave[i] = simulate_block(config.fading.dopplers, params, inputs.weights, block_bits,
                               derive_seed({config.master_seed, point_key, next_block + i}));
    };
    if (count == 1) {
      run(0);
    } else {
      std::vector<std::thread> threads;
      threads.reserve(count);
      for (std::uint64_t i = 0; i < count; ++i) threads.emplace_back(run, i);
      for (auto& t : threads) t.join();
    }
    // Accumulate in block order and stop at the first block that satisfies the
    // rule, so extra blocks computed in parallel never change the result.
    for (std::uint64_t i = 0; i < count; ++i) {
      point.bit_errors += wave[i].bit_errors;
      point.bits_simulated += wave[i].bits;
      if (point.bit_errors >= config.stopping.min_bit_errors || next_block + i + 1 >= max_blocks) {
        done = true;
        break;
      }
    }
    next_block += count;
  }

  point.truncated = point.bit_errors < config.stopping.min_bit_errors;
  point.ber_simulated =
      static_cast<double>(point.bit_errors) / static_cast<double>(point.bits_simulated);
  std::tie(point.ci95_low, point.ci95_high) = wilson_interval(point.bit_errors, point.bits_simulated);
  return point;
}

inline SweepResult run_sweep(const SweepConfig& config, unsigned workers = 1) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  SweepResult result;
  result.config = config;
  for (double snr : config.snr_grid_db) result.points.push_back(simulate_point(config, snr, workers));
  result.error_floor = error_floor(config.model());
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace daf
