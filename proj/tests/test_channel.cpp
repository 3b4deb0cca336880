#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "daf/channel.hpp"
#include "daf/errors.hpp"
#include "daf/fading_dump.hpp"
#include "daf/rng.hpp"
#include "daf/special_math.hpp"

using namespace daf;

namespace {

LinkSpec link_with(double fa, double fb, double variance = 1.0) {
  return {LinkId::SD, variance, {fa, fb}};
}

}  // namespace

TEST(NodeDopplers, LinkEndpointMap) {
  const NodeDopplers f{0.05, 0.02, 0.001};
  EXPECT_EQ(LinkSpec::from_nodes(LinkId::SD, 1.0, f).dopplers, (DopplerPair{0.05, 0.001}));
  EXPECT_EQ(LinkSpec::from_nodes(LinkId::SR, 1.0, f).dopplers, (DopplerPair{0.02, 0.05}));
  EXPECT_EQ(LinkSpec::from_nodes(LinkId::RD, 1.0, f).dopplers, (DopplerPair{0.001, 0.02}));
}

TEST(NodeDopplers, CaseTable) {
  EXPECT_EQ(dopplers_for(FadingCase::CaseI), (NodeDopplers{0.001, 0.001, 0.001}));
  EXPECT_EQ(dopplers_for(FadingCase::CaseII), (NodeDopplers{0.02, 0.001, 0.001}));
  EXPECT_EQ(dopplers_for(FadingCase::CaseIII), (NodeDopplers{0.05, 0.02, 0.001}));
}

TEST(NodeDopplers, Validation) {
  EXPECT_THROW((NodeDopplers{-0.1, 0.0, 0.0}.validate()), ArgumentError);
  EXPECT_THROW((NodeDopplers{0.0, 0.5, 0.0}.validate()), ArgumentError);
  EXPECT_THROW(link_with(0.01, 0.01, 0.0).validate(), ArgumentError);
}

TEST(TheoreticalAcf, LagZeroIsVariance) {
  EXPECT_EQ(theoretical_acf(link_with(0.05, 0.02, 3.5), 0), 3.5);
}

TEST(TheoreticalAcf, SpotValues) {
  EXPECT_NEAR(theoretical_acf(link_with(0.001, 0.001), 1), 0.99998, 1e-5);
  EXPECT_NEAR(theoretical_acf(link_with(0.05, 0.001), 1), 0.97541, 1e-4);
  EXPECT_THROW(theoretical_acf(link_with(0.001, 0.001), -1), ArgumentError);
}

TEST(TheoreticalAcf, ProductOfBessels) {
  const double two_pi = 2.0 * std::numbers::pi;
  for (auto [fa, fb] : {std::pair{0.001, 0.02}, {0.05, 0.02}, {0.3, 0.1}}) {
    for (int lag : {0, 1, 5, 17, 40}) {
      const double expected = 2.0 * bessel_j0(two_pi * fa * lag) * bessel_j0(two_pi * fb * lag);
      EXPECT_DOUBLE_EQ(theoretical_acf(link_with(fa, fb, 2.0), lag), expected);
    }
  }
}

TEST(TheoreticalAcf, SingleMovingEndpointIsJakes) {
  for (int lag = 0; lag <= 30; ++lag) {
    const double jakes = bessel_j0(2.0 * std::numbers::pi * 0.02 * lag);
    EXPECT_DOUBLE_EQ(theoretical_acf(link_with(0.02, 0.0), lag), jakes);
    EXPECT_DOUBLE_EQ(theoretical_acf(link_with(0.0, 0.02), lag), jakes);
  }
}

TEST(Lag1Alpha, SpotValues) {
  EXPECT_EQ(lag1_alpha(link_with(0.0, 0.0)), 1.0);
  EXPECT_NEAR(lag1_alpha(link_with(0.001, 0.001)), 0.99998, 1e-5);
  EXPECT_NEAR(lag1_alpha(link_with(0.05, 0.001, 4.0)), 0.97541, 1e-4);
}

TEST(GenerateFading, RejectsEmpty) {
  EXPECT_THROW(generate_fading(link_with(0.01, 0.01), 0, 1), ArgumentError);
}

TEST(GenerateFading, StaticLinkIsConstant) {
  const auto p = generate_fading(link_with(0.0, 0.0), 10000, 3);
  for (const auto& h : p.samples) EXPECT_EQ(h, p.samples.front());
}

TEST(GenerateFading, Determinism) {
  const auto link = link_with(0.001, 0.001);
  const auto a = generate_fading(link, 5000, 7);
  const auto b = generate_fading(link, 5000, 7);
  const auto c = generate_fading(link, 5000, 8);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
  EXPECT_EQ(a.seed, 7u);
}

TEST(GenerateFading, StreamIsContinuousAcrossFills) {
  const auto link = link_with(0.05, 0.02);
  SosFadingGenerator whole(link, 9), parts(link, 9);
  std::vector<cplx> a(10000), b(10000);
  whole.fill(a);
  parts.fill(std::span(b).first(3333));
  parts.fill(std::span(b).subspan(3333));
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(std::abs(a[k] - b[k]), 0.0, 1e-12);
}

TEST(GenerateFading, SlowFadingStatistics) {
  const auto link = link_with(0.001, 0.001);
  const auto p = generate_fading(link, 2'000'000, 7);
  const auto acf = empirical_acf(p.samples, 20);
  EXPECT_NEAR(acf[1], 0.99998, 0.01);
  for (int lag = 0; lag <= 20; ++lag) EXPECT_NEAR(acf[lag], theoretical_acf(link, lag), 0.01);
}

// The per-realization power fluctuates with so few independent ring states in
// one slow realization; the marginal is checked over many realizations.
TEST(GenerateFading, MarginalMoments) {
  for (auto [fa, fb] : {std::pair{0.001, 0.001}, {0.05, 0.001}, {0.02, 0.05}}) {
    const auto link = link_with(fa, fb, 2.0);
    double power = 0.0, re = 0.0, im = 0.0, fourth = 0.0;
    const int realizations = 2000;
    const std::size_t len = 500;
    for (int r = 0; r < realizations; ++r) {
      const auto p = generate_fading(link, len, 1000 + r);
      for (const auto& h : p.samples) {
        power += std::norm(h);
        fourth += std::norm(h) * std::norm(h);
        re += h.real();
        im += h.imag();
      }
    }
    const double n = static_cast<double>(realizations * len);
    EXPECT_NEAR(power / n, 2.0, 0.04) << fa << "," << fb;
    EXPECT_NEAR(re / n, 0.0, 0.05);
    EXPECT_NEAR(im / n, 0.0, 0.05);
    // Rayleigh: E|h|^4 = 2 sigma^4.
    EXPECT_NEAR(fourth / n / 8.0, 1.0, 0.05);
  }
}

TEST(GenerateFading, LongRunPowerForFastLinks) {
  const auto p = generate_fading(link_with(0.05, 0.02), 1'000'000, 2);
  double power = 0.0;
  for (const auto& h : p.samples) power += std::norm(h);
  EXPECT_NEAR(power / static_cast<double>(p.samples.size()), 1.0, 0.1);
}

TEST(GenerateFading, AcfAllCases) {
  for (auto c : {FadingCase::CaseI, FadingCase::CaseII, FadingCase::CaseIII}) {
    for (auto id : {LinkId::SD, LinkId::SR, LinkId::RD}) {
      const auto link = LinkSpec::from_nodes(id, 1.0, dopplers_for(c));
      const auto p = generate_fading(link, 1'000'000, 21);
      const auto acf = empirical_acf(p.samples, 20);
      for (int lag = 0; lag <= 20; ++lag) {
        EXPECT_NEAR(acf[lag], theoretical_acf(link, lag), 0.01)
            << to_string(c) << " " << to_string(id) << " lag " << lag;
      }
    }
  }
}

TEST(GenerateFading, CascadeLagOneCorrelation) {
  for (auto c : {FadingCase::CaseI, FadingCase::CaseII, FadingCase::CaseIII}) {
    const auto f = dopplers_for(c);
    const auto l1 = LinkSpec::from_nodes(LinkId::SR, 1.0, f);
    const auto l2 = LinkSpec::from_nodes(LinkId::RD, 1.0, f);
    const auto h1 = generate_fading(l1, 2'000'000, 31);
    const auto h2 = generate_fading(l2, 2'000'000, 32);
    std::vector<cplx> h(h1.samples.size());
    for (std::size_t k = 0; k < h.size(); ++k) h[k] = h1.samples[k] * h2.samples[k];
    const auto acf = empirical_acf(h, 1);
    EXPECT_NEAR(acf[1], lag1_alpha(l1) * lag1_alpha(l2), 0.015) << to_string(c);
  }
}

TEST(EmpiricalAcf, NeedsMoreSamplesThanLags) {
  std::vector<cplx> h(5, cplx(1.0, 0.0));
  EXPECT_THROW(empirical_acf(h, 5), ArgumentError);
  EXPECT_THROW(empirical_acf(h, -1), ArgumentError);
  EXPECT_EQ(empirical_acf(h, 4)[4], 1.0);
}

TEST(Ar1, StepExamples) {
  EXPECT_EQ(ar1_step({1.0, 0.0}, {1.0, 1.0}, {5.0, -3.0}), cplx(1.0, 0.0));
  EXPECT_EQ(ar1_step({0.0, 0.0}, {0.0, 1.0}, {0.3, 0.4}), cplx(0.3, 0.4));
  const cplx r = ar1_step({2.0, 0.0}, {0.8, 1.0}, {1.0, 1.0});
  EXPECT_NEAR(r.real(), 2.2, 1e-15);
  EXPECT_NEAR(r.imag(), 0.6, 1e-15);
  EXPECT_THROW((Ar1Params{1.5, 1.0}.validate()), ArgumentError);
}

TEST(Ar1, CascadedStepExamples) {
  EXPECT_EQ(cascaded_ar1_step({0.7, -0.1}, {3.0, 0.0}, 1.0, {2.0, 2.0}), cplx(0.7, -0.1));
  const cplx r = cascaded_ar1_step({1.0, 0.0}, {2.0, 0.0}, 0.6, {0.5, 0.0});
  EXPECT_NEAR(r.real(), 1.4, 1e-15);
  EXPECT_EQ(r.imag(), 0.0);
}

// h = h1 h2 evolves by the cascaded recursion while h2 follows its own AR(1);
// the cascade keeps unit variance.
TEST(Ar1, CascadedVarianceIsPreserved) {
  std::mt19937_64 rng(77);
  ComplexGaussian cn(1.0);
  const double a1 = 0.95, a2 = 0.9;
  cplx h2 = cn(rng), h = cn(rng) * h2;
  double acc = 0.0;
  const int steps = 1'000'000;
  for (int k = 0; k < steps; ++k) {
    const cplx e1 = cn(rng), e2 = cn(rng);
    const cplx next_h2 = ar1_step(h2, {a2, 1.0}, e2);
    h = cascaded_ar1_step(h, h2, a1 * a2, e1);
    h2 = next_h2;
    acc += std::norm(h);
  }
  EXPECT_NEAR(acc / steps, 1.0, 0.02);
}

TEST(FadingDump, RoundTripAndLayout) {
  const auto p = generate_fading({LinkId::RD, 2.5, {0.02, 0.001}}, 17, 99);
  std::stringstream ss;
  write_fading_dump(ss, p);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 1u + 5 * 8 + 17 * 16);
  EXPECT_EQ(static_cast<unsigned char>(bytes[0]), 2);
  // length field, little-endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[1 + 24]), 17);
  for (int i = 1; i < 8; ++i) EXPECT_EQ(bytes[1 + 24 + i], 0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[1 + 32]), 99);

  std::stringstream in(bytes);
  const auto q = read_fading_dump(in);
  EXPECT_EQ(q.link.id, LinkId::RD);
  EXPECT_EQ(q.link.variance, 2.5);
  EXPECT_EQ(q.link.dopplers, (DopplerPair{0.02, 0.001}));
  EXPECT_EQ(q.seed, 99u);
  EXPECT_EQ(q.samples, p.samples);
}

TEST(FadingDump, TruncatedInputThrows) {
  const auto p = generate_fading(link_with(0.01, 0.01), 4, 1);
  std::stringstream ss;
  write_fading_dump(ss, p);
  std::string bytes = ss.str();
  bytes.resize(bytes.size() - 3);
  std::stringstream in(bytes);
  EXPECT_THROW(read_fading_dump(in), ArgumentError);
}
