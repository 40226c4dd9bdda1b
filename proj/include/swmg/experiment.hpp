#pragma once

// Measurement procedures on the simulated gate: amplitude and phase
// calibration, the switching (rise-time) experiment, fitting of the effective
// i2 path length, and the miniaturization study.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swmg/circuit.hpp"
#include "swmg/error.hpp"
#include "swmg/logic.hpp"
#include "swmg/signal.hpp"

namespace swmg::experiment {

using circuit::Channel;
using circuit::GateNetlist;
using cplx = std::complex<double>;
using logic::kPi;
using logic::wrap_phase;

// --- calibration ----------------------------------------------------------

struct CalibrationResult {
  std::array<double, 3> attenuator_dB{};
  std::array<double, 3> phase_offsets_rad{};  // channel phase relative to i2
  double residual_amplitude_imbalance = 1.0;
  double residual_phase_error = 0.0;
};

/// Single-channel output amplitudes at the carrier, other inputs muted.
inline std::array<double, 3> channel_amplitudes(const GateNetlist& n) {
  std::array<double, 3> a{};
  for (Channel ch : circuit::kChannels) {
    std::array<bool, 3> on{};
    on[circuit::index(ch)] = true;
    a[circuit::index(ch)] = std::abs(logic::carrier_output(n, n.phase_trim, on));
  }
  return a;
}

/// Attenuator settings that bring every channel down to the weakest one.
inline std::array<double, 3> calibrate_amplitudes(const GateNetlist& n) {
  const auto amp = channel_amplitudes(n);
  for (Channel ch : circuit::kChannels) {
    if (!(amp[circuit::index(ch)] > 0.0)) {
      throw CalibrationError("channel " + circuit::name(ch) + " has no transmission");
    }
  }
  const double weakest = *std::min_element(amp.begin(), amp.end());
  std::array<double, 3> dB{};
  for (std::size_t i = 0; i < 3; ++i) {
    dB[i] = n.attenuation(circuit::kChannels[i]) + 20.0 * std::log10(amp[i] / weakest);
  }
  return dB;
}

inline GateNetlist with_attenuators(GateNetlist n, const std::array<double, 3>& dB) {
  for (Channel ch : circuit::kChannels) n = n.with_attenuation(ch, dB[circuit::index(ch)]);
  return n;
}

inline constexpr int kCoarseScanPoints = 64;
inline constexpr double kPhaseTolerance = 1e-9;

/// Extremum of a smooth 2π-periodic objective: a coarse scan over (-π, π]
/// followed by golden-section refinement around the best grid point.
inline double optimize_phase(const std::function<double(double)>& objective, bool maximize) {
  const double sign = maximize ? 1.0 : -1.0;
  auto f = [&](double x) { return sign * objective(x); };
  const double step = 2.0 * kPi / kCoarseScanPoints;
  double best_x = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= kCoarseScanPoints; ++i) {
    const double x = -kPi + step * i;
    const double v = f(x);
    if (v > best) best = v, best_x = x;
    worst = std::min(worst, v);
  }
  if (!(best - worst > 1e-12 * std::max(std::abs(best), std::abs(worst))) || best == worst) {
    throw CalibrationError("phase calibration: flat objective (dead channel?)");
  }
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = best_x - step;
  double b = best_x + step;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > kPhaseTolerance) {
    if (fc > fd) {
      b = d, d = c, fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return wrap_phase(0.5 * (a + b));
}

/// With i2 fixed at its trim, finds for i1 and i3 the shifter setting that
/// maximizes the two-channel output; that setting becomes the channel's
/// logic-0 trim. Returns the trims (i2 keeps its own).
inline std::array<double, 3> calibrate_phase_trims(const GateNetlist& n) {
  std::array<double, 3> trims = n.phase_trim;
  for (Channel ch : {Channel::i1, Channel::i3}) {
    const auto i = circuit::index(ch);
    std::array<bool, 3> on{};
    on[1] = true;
    on[i] = true;
    auto objective = [&](double phi) {
      auto shifter = n.phase_trim;
      shifter[i] = phi;
      return std::abs(logic::carrier_output(n, shifter, on));
    };
    trims[i] = optimize_phase(objective, true);
  }
  return trims;
}

/// Phase offsets of each channel relative to i2 implied by the trims.
inline std::array<double, 3> calibrate_phases(const GateNetlist& n) {
  const auto trims = calibrate_phase_trims(n);
  std::array<double, 3> offsets{};
  for (std::size_t i = 0; i < 3; ++i) offsets[i] = wrap_phase(trims[1] - trims[i]);
  return offsets;
}

struct Calibrated {
  GateNetlist netlist;
  CalibrationResult result;
};

/// Amplitude then phase calibration. The input netlist is not modified.
inline Calibrated calibrate(const GateNetlist& input) {
  Calibrated out{input, {}};
  out.result.attenuator_dB = calibrate_amplitudes(input);
  out.netlist = with_attenuators(input, out.result.attenuator_dB);
  out.netlist.phase_trim = calibrate_phase_trims(out.netlist);
  for (Channel ch : circuit::kChannels) {
    out.netlist = out.netlist.with_phase(ch, out.netlist.phase_trim[circuit::index(ch)]);
  }
  const auto& trims = out.netlist.phase_trim;
  for (std::size_t i = 0; i < 3; ++i) {
    out.result.phase_offsets_rad[i] = wrap_phase(trims[1] - trims[i]);
  }

  const auto amp = channel_amplitudes(out.netlist);
  out.result.residual_amplitude_imbalance =
      *std::max_element(amp.begin(), amp.end()) / *std::min_element(amp.begin(), amp.end());
  const double ref = logic::reference_phase(out.netlist);
  double err = 0.0;
  for (Channel ch : {Channel::i1, Channel::i3}) {
    std::array<bool, 3> on{};
    on[circuit::index(ch)] = true;
    const cplx v = logic::carrier_output(out.netlist, trims, on);
    err = std::max(err, std::abs(wrap_phase(std::arg(v) - ref)));
  }
  out.result.residual_phase_error = err;
  return out;
}

// --- switching experiment -------------------------------------------------

struct SwitchTiming {
  double dt = 0.1e-9;          // s
  double switch_rise = 2e-9;   // raised-cosine ramp width of the microwave switch
  bool toggle = true;          // false keeps i2 in '100' for the whole record
  // Record half-period is at least this many carrier group delays of the i2
  // path, plus settle_margin.
  double delay_factor = 3.0;
  double settle_margin = 200e-9;
};

struct SwitchingResult {
  signal::DetectedTrace trace;
  double t_rise = 0.0;
  double f_clock = 0.0;
  double v_low = 0.0;
  double v_max = 0.0;
  double t_toggle = 0.0;      // start of the i2 ramp
  double t_cross_low = 0.0;   // 1/3 crossing, absolute time
  double t_cross_high = 0.0;  // 2/3 crossing, absolute time
  double group_delay = 0.0;   // i2 path group delay at the carrier
};

/// Toggles the input between '100' and '110' through the switch on i2, adds a
/// reference carrier of phase `ref_phase` (relative to the '100' output) with
/// the '110' output amplitude, detects with the diode and measures the rise.
/// The record is one period of a periodic toggle so circular propagation is
/// exact.
inline SwitchingResult run_switching(const GateNetlist& n, const logic::PhaseEncoding& enc = {},
                                     double ref_phase = kPi, const SwitchTiming& timing = {}) {
  if (!n.has_switch()) throw ConfigError("switching experiment needs the switch on i2");
  const GateNetlist direct = n.with_switch_state(false);
  const auto* delay = direct.find<circuit::DelayLine>(Channel::i2);
  const auto* diode = direct.find_output<circuit::DiodeDetector>();
  if (delay == nullptr || diode == nullptr) throw ConfigError("switching: incomplete netlist");

  const auto carrier = circuit::mode_point(direct.physics, direct.f_carrier);
  if (!carrier.in_band) throw BandError("no propagating mode at the carrier frequency");
  SwitchingResult res;
  res.group_delay = direct.geometry.i2_path_length() / std::abs(carrier.v_g);

  // Shifter phases for '100'; the delay line lags i2 by delay->phase_at_fc.
  std::array<double, 3> shifter{};
  const logic::LogicState s100{{true, false, false}};
  for (std::size_t i = 0; i < 3; ++i) shifter[i] = direct.phase_trim[i] + logic::encode(s100.bits[i], enc);
  const double phase_a = shifter[1];
  const double phase_b = timing.toggle ? phase_a - delay->phase_at_fc : phase_a;

  const cplx h1 = logic::carrier_output(direct, shifter, {true, false, false});
  const cplx h3 = logic::carrier_output(direct, shifter, {false, false, true});
  const cplx h2a = logic::carrier_output(direct, shifter, {false, true, false});
  auto shifter_b = shifter;
  shifter_b[1] = phase_a - delay->phase_at_fc;
  const cplx h2b = logic::carrier_output(direct, shifter_b, {false, true, false});
  const cplx out_100 = h1 + h2a + h3;
  const cplx out_110 = h1 + h2b + h3;
  const cplx reference = std::polar(std::abs(out_110), std::arg(out_100) + ref_phase);

  const double half = std::max(timing.delay_factor * res.group_delay + timing.settle_margin,
                               20.0 * timing.switch_rise);
  const std::size_t n_samples = fft::next_pow2(static_cast<std::size_t>(std::ceil(2.0 * half / timing.dt)));
  const double period = static_cast<double>(n_samples) * timing.dt;
  res.t_toggle = 0.05 * period;
  const double t_back = res.t_toggle + 0.5 * period;

  // i2 drive at unit amplitude with the shifter set to 0; the shifter phase is
  // carried by the envelope so that the ramp passes through the gains.
  const auto drive = signal::make_toggle_envelope(1.0, phase_a, phase_b, res.t_toggle, t_back,
                                                  timing.switch_rise, n_samples, timing.dt,
                                                  direct.f_carrier);
  const GateNetlist zeroed = direct.with_phase(Channel::i2, 0.0);
  const auto freqs = signal::bin_frequencies(drive);
  std::vector<cplx> gains(freqs.size());
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    gains[j] = circuit::channel_transfer(zeroed, Channel::i2,
                                         circuit::mode_point(direct.physics, freqs[j]), carrier);
  }
  auto out = signal::apply_gains(drive, gains);
  const cplx steady = h1 + h3 + reference;
  for (auto& s : out.samples) s += steady;

  res.trace = signal::diode_detect(out, diode->lp_cutoff, diode->responsivity);

  const auto first = static_cast<std::size_t>(std::llround(res.t_toggle / timing.dt));
  const auto last = static_cast<std::size_t>(std::llround(t_back / timing.dt));
  signal::DetectedTrace window{timing.dt, {res.trace.samples.begin() + static_cast<std::ptrdiff_t>(first),
                                           res.trace.samples.begin() + static_cast<std::ptrdiff_t>(last)}};
  const double full_scale =
      diode->responsivity * std::norm(std::abs(out_110) + std::abs(reference));
  const double plateau = [&] {
    const auto tail = static_cast<std::size_t>(signal::kPlateauFraction * window.size());
    double s = 0.0;
    for (std::size_t i = window.size() - tail; i < window.size(); ++i) s += window.samples[i];
    return s / static_cast<double>(tail);
  }();
  if (!(plateau > 1e-6 * full_scale)) throw SignalError("no transition: detected contrast below floor");

  const auto rise = signal::rise_time(window);
  res.t_rise = rise.t_rise;
  res.f_clock = rise.f_clock;
  res.v_max = rise.v_max;
  res.t_cross_low = res.t_toggle + rise.t_low;
  res.t_cross_high = res.t_toggle + rise.t_high;
  const auto head = std::max<std::size_t>(1, window.size() / 100);
  double low = 0.0;
  for (std::size_t i = 0; i < head; ++i) low += window.samples[i];
  res.v_low = low / static_cast<double>(head);
  return res;
}

/// Calibrates and runs the switching experiment at geometry scale `s`.
inline SwitchingResult switching_at_scale(const GateNetlist& n, double s,
                                          const logic::PhaseEncoding& enc = {},
                                          const SwitchTiming& timing = {}) {
  return run_switching(calibrate(n.with_scale(s)).netlist, enc, kPi, timing);
}

struct LengthFit {
  double scale;           // geometry scale reproducing the target
  double L_eff;           // i2 + output path length at that scale (m)
  SwitchingResult result;
};

/// Finds the geometry scale whose switching rise time equals `target` by
/// bracketing upward/downward from the netlist's scale and bisecting in log
/// scale. The fitted i2 path length is the effective length.
inline LengthFit fit_effective_length(const GateNetlist& n, double target = 11.3e-9,
                                      const logic::PhaseEncoding& enc = {},
                                      const SwitchTiming& timing = {},
                                      double rel_tol = 1e-3) {
  auto t_at = [&](double s) { return switching_at_scale(n, s, enc, timing).t_rise; };
  double lo = n.geometry.scale;
  double hi = lo;
  double t_lo = t_at(lo);
  double t_hi = t_lo;
  for (int i = 0; i < 12 && t_hi < target; ++i) {
    lo = hi, t_lo = t_hi;
    hi *= 1.5;
    t_hi = t_at(hi);
  }
  for (int i = 0; i < 12 && t_lo > target; ++i) {
    hi = lo, t_hi = t_lo;
    lo /= 1.5;
    t_lo = t_at(lo);
  }
  if (!(t_lo <= target && target <= t_hi)) {
    throw CalibrationError("effective length fit: target rise time not bracketed");
  }
  for (int i = 0; i < 60; ++i) {
    const double mid = std::sqrt(lo * hi);
    const double t = t_at(mid);
    if (std::abs(t - target) <= rel_tol * target) {
      auto net = n.with_scale(mid);
      return {mid, net.geometry.i2_path_length(), switching_at_scale(n, mid, enc, timing)};
    }
    (t < target ? lo : hi) = mid;
  }
  throw CalibrationError("effective length fit did not converge");
}

// --- scaling --------------------------------------------------------------

struct ScalingRow {
  double scale;       // relative to the baseline netlist
  double t_rise;      // s
  double f_clock;     // Hz
  bool ok;
  std::string error;  // set when !ok
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  double floor_t_rise = 0.0;  // zero-length device
  double slope = 0.0;         // (t_rise - floor) per unit scale, s
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Relative scale used to emulate the zero-length device.
inline constexpr double kZeroLengthScale = 1e-6;

inline ScalingStudy scaling_study(const GateNetlist& baseline, std::span<const double> scales,
                                  const logic::PhaseEncoding& enc = {},
                                  const SwitchTiming& timing = {}) {
  for (double s : scales) detail::require(s > 0.0, "scaling: scales must be positive");
  ScalingStudy study;
  const double s0 = baseline.geometry.scale;
  study.floor_t_rise = switching_at_scale(baseline, s0 * kZeroLengthScale, enc, timing).t_rise;
  std::vector<double> xs, ys;
  for (double s : scales) {
    ScalingRow row{s, 0.0, 0.0, true, {}};
    try {
      const auto r = switching_at_scale(baseline, s0 * s, enc, timing);
      row.t_rise = r.t_rise;
      row.f_clock = r.f_clock;
      xs.push_back(s);
      ys.push_back(r.t_rise - study.floor_t_rise);
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
    study.rows.push_back(row);
  }
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i], sy += ys[i], sxx += xs[i] * xs[i], sxy += xs[i] * ys[i];
    }
    study.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    study.intercept = (sy - study.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = ys[i] - (study.slope * xs[i] + study.intercept);
      ss_res += e * e;
      ss_tot += (ys[i] - mean) * (ys[i] - mean);
    }
    study.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  }
  return study;
}

}  // namespace swmg::experiment
