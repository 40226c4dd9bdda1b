#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "swmg/experiment.hpp"

using namespace swmg;
using namespace swmg::experiment;
using circuit::Channel;

namespace {

physics::ModeContext calibrated_ctx() {
  physics::ModeContext ctx;
  auto film = ctx.film();
  film.Ms = physics::calibrate_Ms(ctx, 6.06e9);
  return ctx.with_film(film);
}

GateNetlist symmetric_gate() {
  circuit::DeviceGeometry g;
  g.L_skew = {0.0, 0.0, 0.0};
  return circuit::build_majority_gate(g, calibrated_ctx());
}

GateNetlist switch_gate(double scale = 1.0) {
  circuit::MicrowaveSettings mw;
  mw.with_switch = true;
  circuit::DeviceGeometry g;
  g.scale = scale;
  return circuit::build_majority_gate(g, calibrated_ctx(), mw);
}

GateNetlist perturbed(GateNetlist n, const std::array<double, 3>& dB,
                      const std::array<double, 3>& phase) {
  for (Channel ch : circuit::kChannels) {
    const auto i = circuit::index(ch);
    n = n.with_input_coupling(ch, std::polar(std::pow(10.0, dB[i] / 20.0), phase[i]));
  }
  return n;
}

}  // namespace

TEST(CalibrateAmplitudes, SymmetricNeedsNothing) {
  for (double dB : calibrate_amplitudes(symmetric_gate())) EXPECT_NEAR(dB, 0.0, 1e-9);
  for (double p : calibrate_phases(symmetric_gate())) EXPECT_NEAR(p, 0.0, 1e-6);
}

TEST(CalibrateAmplitudes, HalvingGains) {
  const auto n = perturbed(symmetric_gate(), {0.0, 20 * std::log10(0.5), 20 * std::log10(0.25)}, {});
  const auto dB = calibrate_amplitudes(n);
  EXPECT_NEAR(dB[0], 12.04, 0.01);
  EXPECT_NEAR(dB[1], 6.02, 0.01);
  EXPECT_NEAR(dB[2], 0.0, 1e-9);
  const auto cal = calibrate(n);
  EXPECT_LE(cal.result.residual_amplitude_imbalance, 1.001);
}

TEST(CalibrateAmplitudes, DeadChannelRejected) {
  const auto n = symmetric_gate().with_input_coupling(Channel::i3, 0.0);
  EXPECT_THROW(calibrate_amplitudes(n), CalibrationError);
  try {
    calibrate_amplitudes(n);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("channel i3 has no transmission"), std::string::npos);
  }
}

TEST(CalibratePhases, RecoversInjectedOffsets) {
  const auto n = perturbed(symmetric_gate(), {}, {0.7, 0.0, -1.2});
  const auto offsets = calibrate_phases(n);
  EXPECT_NEAR(offsets[0], 0.7, 1e-3);
  EXPECT_NEAR(offsets[1], 0.0, 1e-12);
  EXPECT_NEAR(offsets[2], -1.2, 1e-3);
  // Brute-force oracle: fine scan of the two-channel output.
  const auto trims = calibrate_phase_trims(n);
  for (std::size_t i : {0u, 2u}) {
    double best = -1.0, best_phi = 0.0;
    for (int j = -31416; j <= 31416; ++j) {
      const double phi = j * 1e-4;
      std::array<double, 3> shifter = n.phase_trim;
      shifter[i] = phi;
      std::array<bool, 3> on{};
      on[1] = on[i] = true;
      const double v = std::abs(logic::carrier_output(n, shifter, on));
      if (v > best) best = v, best_phi = phi;
    }
    EXPECT_NEAR(logic::wrap_phase(trims[i] - best_phi), 0.0, 2e-4);
  }
}

TEST(CalibratePhases, MaximumAndMinimumDifferByPi) {
  auto objective = [](double x) { return std::abs(1.0 + std::polar(0.8, x + 0.3)); };
  const double hi = optimize_phase(objective, true);
  const double lo = optimize_phase(objective, false);
  EXPECT_NEAR(std::abs(logic::wrap_phase(hi - lo)), logic::kPi, 1e-6);
  EXPECT_NEAR(hi, -0.3, 1e-6);
  EXPECT_THROW(optimize_phase([](double) { return 1.0; }, true), CalibrationError);
}

TEST(Calibrate, Idempotent) {
  const auto n = perturbed(switch_gate(), {2.0, -3.0, 1.0}, {0.4, -2.0, 2.5});
  const auto once = calibrate(n);
  const auto twice = calibrate(once.netlist);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(twice.result.attenuator_dB[i], once.result.attenuator_dB[i], 1e-6);
    EXPECT_NEAR(logic::wrap_phase(twice.netlist.phase_trim[i] - once.netlist.phase_trim[i]), 0.0, 1e-6);
  }
}

TEST(Calibrate, RobustToRandomHardwarePerturbation) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> gain(-6.0, 6.0), phase(-logic::kPi, logic::kPi);
  const auto base = circuit::build_majority_gate(circuit::DeviceGeometry{}, calibrated_ctx());
  for (int trial = 0; trial < 25; ++trial) {
    const auto n = perturbed(base, {gain(rng), gain(rng), gain(rng)},
                             {phase(rng), phase(rng), phase(rng)});
    const auto t = logic::truth_table(calibrate(n).netlist);
    EXPECT_TRUE(t.all_correct) << trial;
    EXPECT_GT(t.min_margin, logic::kPi / 4) << trial;
    EXPECT_NEAR(t.amplitude_ratio, 3.0, 1e-6) << trial;
  }
}

TEST(Switching, ProducesTransition) {
  const auto r = switching_at_scale(switch_gate(), 1.0);
  EXPECT_GT(r.t_rise, 0.0);
  EXPECT_DOUBLE_EQ(r.f_clock, 1.0 / r.t_rise);
  EXPECT_LT(r.v_low, 0.01 * r.v_max);
  EXPECT_GT(r.t_cross_low, r.t_toggle);
  EXPECT_GT(r.t_cross_high, r.t_cross_low);
}

TEST(Switching, NoToggleMeansNoTransition) {
  SwitchTiming timing;
  timing.toggle = false;
  const auto n = calibrate(switch_gate()).netlist;
  try {
    run_switching(n, {}, logic::kPi, timing);
    FAIL();
  } catch (const SignalError& e) {
    EXPECT_NE(std::string(e.what()).find("no transition"), std::string::npos);
  }
}

TEST(Switching, NeedsSwitchOnI2) {
  EXPECT_THROW(run_switching(symmetric_gate()), ConfigError);
}

TEST(Switching, RiseTimeGrowsWithPathLength) {
  // i2 path is 20 mm at scale 1; cover 10 to 40 mm.
  double prev = 0.0;
  for (double s : {0.5, 0.75, 1.0, 1.25, 1.5, 2.0}) {
    const double t = switching_at_scale(switch_gate(), s).t_rise;
    EXPECT_GE(t, prev) << s;
    prev = t;
  }
}

TEST(Switching, ZeroLengthFloorIsNearTheRamp) {
  const double floor = switching_at_scale(switch_gate(), kZeroLengthScale).t_rise;
  // Unfiltered oracle: the same phase ramp with no propagation at all.
  const SwitchTiming timing;
  auto env = signal::make_step_phase_envelope(1.0, 0.0, -logic::kPi, 50e-9, timing.switch_rise,
                                              400e-9, timing.dt, 6.035e9);
  for (auto& s : env.samples) s -= 1.0;  // i1 + i3 + reference cancel the initial i2 term
  const auto bare = signal::rise_time(signal::diode_detect(env, 500e6)).t_rise;
  EXPECT_GE(floor, bare);
  EXPECT_LT(floor, 3e-9);
}

TEST(Scaling, LinearAboveFloor) {
  const auto fit = fit_effective_length(switch_gate(), 11.3e-9);
  const std::vector<double> scales{1.0, 0.5, 0.2, 0.1, 0.05};
  const auto study = scaling_study(switch_gate(fit.scale), scales);
  ASSERT_EQ(study.rows.size(), scales.size());
  for (const auto& r : study.rows) EXPECT_TRUE(r.ok) << r.error;
  EXPECT_GT(study.r_squared, 0.99);
  EXPECT_NEAR(study.rows[0].t_rise, 11.3e-9, 0.05 * 11.3e-9);
  EXPECT_LT(study.rows.back().t_rise - study.floor_t_rise, 1e-9);
  EXPECT_THROW(scaling_study(switch_gate(), std::vector<double>{1.0, -1.0}), ConfigError);
}
