#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "swmg/circuit.hpp"

using namespace swmg;
using namespace swmg::circuit;

namespace {

physics::ModeContext calibrated_ctx() {
  physics::ModeContext ctx;
  auto film = ctx.film();
  film.Ms = physics::calibrate_Ms(ctx, 6.06e9);
  return ctx.with_film(film);
}

GateNetlist default_gate(MicrowaveSettings mw = {}) {
  return build_majority_gate(DeviceGeometry{}, calibrated_ctx(), mw);
}

std::vector<double> band_grid(const physics::ModeContext& ctx, int n = 64) {
  const auto band = physics::propagating_band(ctx);
  std::vector<double> f;
  for (int i = 1; i <= n; ++i) f.push_back(band.lower + (band.upper - band.lower) * i / (n + 1.0));
  return f;
}

}  // namespace

TEST(Transducer, SincSelectivity) {
  const DeviceGeometry g;
  ModePoint m{6e9, true, 1e-9, -3e4};
  EXPECT_NEAR(std::abs(transducer_efficiency(m, g, 0.7)), 0.7, 1e-12);
  m.k = 2.0 * std::numbers::pi / g.w_a;
  EXPECT_NEAR(std::abs(transducer_efficiency(m, g)), 0.0, 1e-12);
  m.k = 5.7e3;
  EXPECT_NEAR(0.5 * m.k * g.w_a, 0.214, 0.001);
  EXPECT_NEAR(std::abs(transducer_efficiency(m, g)), 0.992, 0.001);
  m.in_band = false;
  EXPECT_EQ(transducer_efficiency(m, g), cplx{0.0});
}

TEST(Waveguide, ZeroLengthIsUnity) {
  const auto ctx = calibrated_ctx();
  EXPECT_EQ(waveguide_transfer(ctx, 0.0, 6.035e9, 6.035e9), cplx{1.0});
  EXPECT_EQ(waveguide_transfer(ctx, 0.0, 7e9, 6.035e9), cplx{1.0});
}

TEST(Waveguide, LosslessCarrierPhase) {
  auto ctx = calibrated_ctx();
  auto film = ctx.film();
  film.deltaH0 = 0.0;
  ctx = ctx.with_film(film);
  const double L = 3e-3;
  const cplx g = waveguide_transfer(ctx, L, 6.035e9, 6.035e9);
  EXPECT_NEAR(std::abs(g), 1.0, 1e-14);
  const double k = physics::solve_k(ctx, 6.035e9);
  EXPECT_NEAR(std::arg(g * std::polar(1.0, k * L)), 0.0, 1e-9);
}

TEST(Waveguide, FiveMillimetresDecayToAboutOneOverE) {
  const double mag = std::abs(waveguide_transfer(calibrated_ctx(), 5e-3, 6.035e9, 6.035e9));
  EXPECT_NEAR(mag, std::exp(-1.0), 0.03);
}

TEST(Waveguide, StopbandIsZero) {
  EXPECT_EQ(waveguide_transfer(calibrated_ctx(), 1e-3, 7e9, 6.035e9), cplx{0.0});
  EXPECT_THROW(waveguide_transfer(calibrated_ctx(), 1e-3, 6e9, 7e9), BandError);
}

TEST(ChannelTransfer, IdentityChains) {
  GateNetlist n;
  n.physics = calibrated_ctx();
  for (auto& c : n.inputs) c = {Source{}, Combiner{}};
  for (Channel ch : kChannels) EXPECT_EQ(channel_transfer(n, ch, 6.035e9), cplx{1.0});
  n.inputs[0] = {Source{}, Attenuator{3.0}, Combiner{}};
  EXPECT_NEAR(std::abs(channel_transfer(n, Channel::i1, 6.035e9)), std::pow(10.0, -3.0 / 20.0), 1e-15);
}

TEST(ChannelTransfer, DefaultGateInBandAndStopband) {
  const auto n = default_gate();
  for (Channel ch : kChannels) {
    const double g = std::abs(channel_transfer(n, ch, 6.035e9));
    EXPECT_GT(g, 0.0);
    EXPECT_TRUE(std::isfinite(g));
    EXPECT_EQ(channel_transfer(n, ch, 7e9), cplx{0.0});
  }
}

TEST(ChannelTransfer, SplittingASegmentIsExact) {
  const auto ctx = calibrated_ctx();
  GateNetlist whole, split;
  whole.physics = split.physics = ctx;
  whole.inputs[0] = {Source{}, WaveguideSegment{7e-3}, Combiner{}};
  split.inputs[0] = {Source{}, WaveguideSegment{2.5e-3}, WaveguideSegment{4.5e-3}, Combiner{}};
  for (double f : band_grid(ctx)) {
    const cplx a = channel_transfer(whole, Channel::i1, f);
    const cplx b = channel_transfer(split, Channel::i1, f);
    EXPECT_NEAR(std::abs(a - b), 0.0, 1e-12) << f;
  }
}

TEST(ChannelTransfer, MagnitudeIndependentOfSegmentOrder) {
  const auto ctx = calibrated_ctx();
  GateNetlist fwd, rev;
  fwd.physics = rev.physics = ctx;
  fwd.inputs[0] = {WaveguideSegment{1e-3}, Bend{3.0}, WaveguideSegment{6e-3}};
  rev.inputs[0] = {WaveguideSegment{6e-3}, Bend{3.0}, WaveguideSegment{1e-3}};
  for (double f : band_grid(ctx)) {
    EXPECT_NEAR(std::abs(channel_transfer(fwd, Channel::i1, f)),
                std::abs(channel_transfer(rev, Channel::i1, f)), 1e-15);
  }
}

TEST(ChannelTransfer, AddedLossNeverIncreasesGain) {
  const auto base = default_gate();
  const auto ctx = base.physics;
  for (Component extra : {Component{Attenuator{0.5}}, Component{Bend{3.0}}}) {
    auto lossy = base;
    auto& chain = lossy.chain(Channel::i2);
    chain.insert(chain.begin() + 1, extra);
    for (double f : band_grid(ctx)) {
      EXPECT_LE(std::abs(channel_transfer(lossy, Channel::i2, f)),
                std::abs(channel_transfer(base, Channel::i2, f)));
    }
  }
}

TEST(ChannelTransfer, CrosstalkBypassesSpinWaves) {
  MicrowaveSettings mw;
  mw.crosstalk = {cplx{1e-3}, cplx{}, cplx{}};
  const auto n = default_gate(mw);
  // Above FMR only the direct pickup remains: splitter gain times crosstalk.
  EXPECT_NEAR(std::abs(channel_transfer(n, Channel::i1, 7e9)), 1e-3 / std::sqrt(3.0), 1e-15);
  EXPECT_EQ(channel_transfer(n, Channel::i2, 7e9), cplx{0.0});
}

TEST(Spectrum, PassbandBelowFmrFloorAbove) {
  const auto n = default_gate();
  const double fmr = physics::fmr_frequency(n.physics);
  const double larmor = n.physics.omegaH() / physics::kTwoPi;
  std::vector<double> grid;
  for (double f = 3.9e9; f <= 6.2e9; f += 5e6) grid.push_back(f);
  for (Channel ch : kChannels) {
    bool any_pass = false;
    for (const auto& p : transmission_spectrum(n, ch, grid)) {
      if (p.f >= fmr || p.f <= larmor) {
        EXPECT_EQ(p.dB, -80.0);
      }
      if (p.dB > -80.0) any_pass = true;
    }
    EXPECT_TRUE(any_pass);
  }
  std::vector<double> bad{6e9, 5e9};
  EXPECT_THROW(transmission_spectrum(n, Channel::i1, bad), ConfigError);
}

TEST(Spectrum, DistinctArmsGiveDistinctLevels) {
  DeviceGeometry g;
  g.L_skew = {6e-3, 0.0, 9e-3};
  const auto n = build_majority_gate(g, calibrated_ctx());
  std::vector<double> f{6.035e9};
  const double a = transmission_spectrum(n, Channel::i1, f)[0].dB;
  const double b = transmission_spectrum(n, Channel::i2, f)[0].dB;
  const double c = transmission_spectrum(n, Channel::i3, f)[0].dB;
  EXPECT_GT(b, a);
  EXPECT_GT(a, c);
}

TEST(Build, StructureAndSwitch) {
  const auto plain = default_gate();
  EXPECT_EQ(plain.inputs.size(), 3u);
  EXPECT_FALSE(plain.has_switch());
  EXPECT_EQ(plain.find<Bend>(Channel::i2), nullptr);
  EXPECT_NE(plain.find<Bend>(Channel::i1), nullptr);
  EXPECT_NE(plain.find_output<DiodeDetector>(), nullptr);
  MicrowaveSettings mw;
  mw.with_switch = true;
  const auto sw = default_gate(mw);
  EXPECT_TRUE(sw.has_switch());
  EXPECT_EQ(sw.find<Switch>(Channel::i1), nullptr);
  EXPECT_NE(sw.find<DelayLine>(Channel::i2), nullptr);
}

TEST(Build, ScaleMultipliesEveryLength) {
  DeviceGeometry g;
  g.scale = 0.05;
  const auto scaled = build_majority_gate(g, calibrated_ctx());
  const auto rescaled = default_gate().with_scale(0.05);
  EXPECT_NEAR(scaled.geometry.i2_path_length(), 0.05 * 20e-3, 1e-15);
  for (Channel ch : kChannels) {
    EXPECT_NEAR(std::abs(channel_transfer(scaled, ch, 6.0e9) - channel_transfer(rescaled, ch, 6.0e9)),
                0.0, 1e-12);
  }
}

TEST(Serialize, ListsEveryComponent) {
  MicrowaveSettings mw;
  mw.with_switch = true;
  const auto doc = serialize(default_gate(mw));
  EXPECT_EQ(doc.get("channel.i1.component[0].kind"), "Source");
  EXPECT_EQ(doc.get("channel.i2.component[4].kind"), "Switch");
  EXPECT_EQ(doc.get("channel.i2.component[5].kind"), "DelayLine");
  EXPECT_EQ(doc.get("output.component[2].kind"), "DiodeDetector");
  EXPECT_EQ(doc.get("geometry.scale"), "1");
  EXPECT_EQ(serialize(default_gate(mw)).str(), doc.str());
}
