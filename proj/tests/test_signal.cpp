#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "swmg/signal.hpp"

using namespace swmg;
using namespace swmg::signal;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexEnvelope random_envelope(std::mt19937& rng, std::size_t n, double dt = 1e-10) {
  std::normal_distribution<double> g;
  ComplexEnvelope env{6.035e9, dt, std::vector<cplx>(n)};
  for (auto& s : env.samples) s = {g(rng), g(rng)};
  return env;
}

ComplexEnvelope constant(cplx v, std::size_t n = 256) {
  return {6.035e9, 1e-10, std::vector<cplx>(n, v)};
}

double energy(const ComplexEnvelope& e) {
  double s = 0.0;
  for (auto v : e.samples) s += std::norm(v);
  return s;
}

}  // namespace

TEST(Envelope, EqualPhasesGiveConstant) {
  const auto e = make_step_phase_envelope(2.0, 0.3, 0.3, 10e-9, 2e-9, 50e-9, 0.1e-9);
  for (auto v : e.samples) EXPECT_NEAR(std::abs(v - std::polar(2.0, 0.3)), 0.0, 1e-15);
}

TEST(Envelope, PhaseRampIsContinuousAtConstantAmplitude) {
  const auto e = make_step_phase_envelope(1.0, 0.0, kPi, 10e-9, 2e-9, 50e-9, 0.1e-9);
  double max_jump = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    EXPECT_NEAR(std::abs(e.samples[i]), 1.0, 1e-14);
    if (i > 0) max_jump = std::max(max_jump, std::abs(std::arg(e.samples[i] / e.samples[i - 1])));
  }
  // steepest raised-cosine step: (π/2)·π·dt/t_rise
  EXPECT_LE(max_jump, 0.5 * kPi * kPi * 0.1e-9 / 2e-9 + 1e-12);
  EXPECT_NEAR(std::arg(e.samples.front()), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(std::arg(e.samples.back())), kPi, 1e-12);
}

TEST(Envelope, RiseLongerThanRecordRejected) {
  EXPECT_THROW(make_step_phase_envelope(1.0, 0.0, kPi, 1e-9, 60e-9, 50e-9, 0.1e-9), SignalError);
  EXPECT_THROW(make_step_phase_envelope(1.0, 0.0, kPi, 60e-9, 1e-9, 50e-9, 0.1e-9), SignalError);
}

TEST(Transfer, IdentityAndConstantPhase) {
  std::mt19937 rng(1);
  const auto x = random_envelope(rng, 300);
  const auto y = apply_transfer(x, TransferFunction::constant(1.0));
  const double phi = 0.77;
  const auto z = apply_transfer(x, TransferFunction::constant(std::polar(1.0, phi)));
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(std::abs(y.samples[i] - x.samples[i]), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(z.samples[i] - x.samples[i] * std::polar(1.0, phi)), 0.0, 1e-12);
  }
}

TEST(Transfer, IntegerDelayEqualsCircularShift) {
  std::mt19937 rng(2);
  for (std::size_t n : {64u, 512u, 2048u}) {
    const auto x = random_envelope(rng, n);
    const std::size_t m = n / 5;
    const auto y = apply_transfer(x, TransferFunction::delay(static_cast<double>(m) * x.dt, x.f_carrier));
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(std::abs(y.samples[i] - x.samples[(i + n - m) % n]), 0.0, 1e-9);
    }
  }
}

TEST(Transfer, Linearity) {
  std::mt19937 rng(3);
  const auto x = random_envelope(rng, 1024);
  const auto y = random_envelope(rng, 1024);
  const cplx a{0.3, -1.2}, b{2.0, 0.5};
  ComplexEnvelope mix = x;
  for (std::size_t i = 0; i < x.size(); ++i) mix.samples[i] = a * x.samples[i] + b * y.samples[i];
  TransferFunction h{[](double f) { return cplx{1.0 / (1.0 + 1e-18 * f * f), 1e-10 * f}; }};
  const auto hx = apply_transfer(x, h), hy = apply_transfer(y, h), hm = apply_transfer(mix, h);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(std::abs(hm.samples[i] - (a * hx.samples[i] + b * hy.samples[i])), 0.0, 1e-10);
  }
}

TEST(Transfer, ParsevalForAllPass) {
  std::mt19937 rng(4);
  const auto x = random_envelope(rng, 4096);
  const auto y = apply_transfer(x, TransferFunction::delay(3.37e-9, x.f_carrier));
  EXPECT_NEAR(energy(y), energy(x), 1e-10 * energy(x));
}

TEST(Transfer, BandOverflowRejected) {
  auto x = constant(1.0);
  TransferFunction h = TransferFunction::constant(1.0);
  h.f_lo = x.f_carrier - 1e9;
  h.f_hi = x.f_carrier + 1e9;  // Nyquist is 5 GHz
  EXPECT_THROW(apply_transfer(x, h), SignalError);
}

TEST(Superpose, MajorityArithmetic) {
  const ComplexEnvelope a = constant(1.0), b = constant(1.0), c = constant(-1.0);
  const std::vector<ComplexEnvelope> split{a, b, c};
  const auto s = superpose(split);
  EXPECT_NEAR(std::abs(s.samples[0]), 1.0, 1e-15);
  EXPECT_NEAR(std::arg(s.samples[0]), 0.0, 1e-15);
  const std::vector<ComplexEnvelope> all{c, c, c};
  const auto u = superpose(all);
  EXPECT_NEAR(std::abs(u.samples[0]), 3.0, 1e-15);
  EXPECT_NEAR(std::abs(std::arg(u.samples[0])), kPi, 1e-15);
  EXPECT_NEAR(std::abs(u.samples[0]) / std::abs(s.samples[0]), 3.0, 1e-15);
}

TEST(Superpose, MismatchedGridsRejected) {
  const std::vector<ComplexEnvelope> bad{constant(1.0, 256), constant(1.0, 128)};
  EXPECT_THROW(superpose(bad), SignalError);
}

TEST(Diode, ConstantAndZero) {
  const auto t = diode_detect(constant(std::polar(1.5, 0.4)), 500e6);
  for (double v : t.samples) EXPECT_NEAR(v, 2.25, 1e-12);
  const auto z = diode_detect(constant(0.0), 500e6);
  for (double v : z.samples) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(diode_detect(constant(1.0), 6e9), SignalError);
}

TEST(Diode, PhaseStepAgainstReferenceGoesDarkToBright) {
  auto step = make_step_phase_envelope(1.0, 0.0, kPi, 20e-9, 2e-9, 200e-9, 0.1e-9, 6.035e9);
  for (auto& s : step.samples) s += std::polar(1.0, kPi);
  const auto t = diode_detect(step, 500e6);
  // |e^{iφ} + e^{iπ}|^2 = 2 - 2cos φ: 0 before, 4 after.
  EXPECT_NEAR(t.samples.front(), 0.0, 1e-12);
  EXPECT_NEAR(t.samples.back(), 4.0, 1e-9);
}

TEST(RiseTime, LinearRampIsOneThird) {
  const double dt = 0.1e-9, T = 30e-9;
  DetectedTrace tr{dt, {}};
  for (int i = 0; i < 2000; ++i) {
    const double t = i * dt - 50e-9;
    tr.samples.push_back(std::clamp(t / T, 0.0, 1.0) * 2.0);
  }
  const auto r = rise_time(tr);
  EXPECT_NEAR(r.t_rise, T / 3.0, dt);
  EXPECT_NEAR(r.f_clock, 1.0 / r.t_rise, 1e-6);
  EXPECT_NEAR(r.v_max, 2.0, 1e-12);
}

TEST(RiseTime, FirstOrderStepIsTauLn2) {
  const double dt = 0.1e-9, tau = 10e-9;
  DetectedTrace tr{dt, {}};
  for (int i = 0; i < 20000; ++i) {
    const double t = i * dt - 20e-9;
    tr.samples.push_back(t <= 0 ? 0.0 : -std::expm1(-t / tau));
  }
  EXPECT_NEAR(rise_time(tr).t_rise, tau * std::log(2.0), dt);
}

TEST(RiseTime, FlatTraceHasNoTransition) {
  DetectedTrace flat{0.1e-9, std::vector<double>(500, 1.0)};
  EXPECT_THROW(rise_time(flat), SignalError);
  DetectedTrace zero{0.1e-9, std::vector<double>(500, 0.0)};
  try {
    rise_time(zero);
    FAIL();
  } catch (const SignalError& e) {
    EXPECT_NE(std::string(e.what()).find("no transition"), std::string::npos);
  }
}

TEST(PhaseEstimate, SignSymmetry) {
  EXPECT_NEAR(phase_estimate(constant(-1.0), 0.0, 10e-9), kPi, 1e-15);
  EXPECT_NEAR(phase_estimate(constant(1.0), 0.0, 10e-9), 0.0, 1e-15);
  const std::vector<ComplexEnvelope> a{constant(1.0), constant(1.0), constant(-1.0)};
  const std::vector<ComplexEnvelope> b{constant(-1.0), constant(-1.0), constant(1.0)};
  EXPECT_NEAR(phase_estimate(superpose(a), 0.0, 10e-9), 0.0, 1e-15);
  EXPECT_NEAR(phase_estimate(superpose(b), 0.0, 10e-9), kPi, 1e-15);
  EXPECT_THROW(phase_estimate(constant(0.0), 0.0, 10e-9), SignalError);
}
