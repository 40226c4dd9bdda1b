#pragma once

// Complex baseband envelopes about a carrier, spectral filtering through
// transfer functions, square-law detection and 1/3-2/3 rise-time metrology.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "swmg/error.hpp"
#include "swmg/fft.hpp"

namespace swmg::signal {

using cplx = std::complex<double>;

struct ComplexEnvelope {
  double f_carrier = 0.0;  // Hz
  double dt = 0.0;         // s
  std::vector<cplx> samples;

  std::size_t size() const { return samples.size(); }
  double time(std::size_t i) const { return static_cast<double>(i) * dt; }
  double duration() const { return static_cast<double>(samples.size()) * dt; }
  double nyquist() const { return 0.5 / dt; }

  void validate() const {
    if (!(dt > 0.0)) throw SignalError("envelope: dt must be positive");
    if (samples.size() < 2) throw SignalError("envelope: need at least two samples");
  }
};

/// Complex gain as a function of absolute frequency, valid on [f_lo, f_hi].
struct TransferFunction {
  std::function<cplx(double)> gain;
  double f_lo = 0.0;
  double f_hi = std::numeric_limits<double>::infinity();

  cplx operator()(double f) const { return gain(f); }

  static TransferFunction constant(cplx g) {
    return {[g](double) { return g; }};
  }
  // Pure delay of tau seconds, referenced to the carrier so that the carrier
  // itself is left untouched.
  static TransferFunction delay(double tau, double f_carrier) {
    return {[tau, f_carrier](double f) {
      return std::polar(1.0, -2.0 * std::numbers::pi * (f - f_carrier) * tau);
    }};
  }
};

struct DetectedTrace {
  double dt = 0.0;
  std::vector<double> samples;  // V

  std::size_t size() const { return samples.size(); }
  double time(std::size_t i) const { return static_cast<double>(i) * dt; }
};

/// Constant-amplitude envelope whose phase follows a raised-cosine ramp of
/// width `t_switch_rise` from `phase_a` to `phase_b`, starting at `t_toggle`.
inline ComplexEnvelope make_step_phase_envelope(double amplitude, double phase_a,
                                                double phase_b, double t_toggle,
                                                double t_switch_rise, double duration,
                                                double dt, double f_carrier = 0.0) {
  if (!(dt > 0.0) || !(duration > 0.0)) throw SignalError("step envelope: bad time grid");
  if (!(t_switch_rise > 0.0) || t_switch_rise >= duration) {
    throw SignalError("step envelope: switch rise must be positive and shorter than duration");
  }
  if (!(t_toggle > 0.0 && t_toggle < duration)) {
    throw SignalError("step envelope: toggle time outside the record");
  }
  const auto n = static_cast<std::size_t>(std::llround(duration / dt));
  ComplexEnvelope env{f_carrier, dt, std::vector<cplx>(std::max<std::size_t>(n, 2))};
  for (std::size_t i = 0; i < env.size(); ++i) {
    const double s = std::clamp((env.time(i) - t_toggle) / t_switch_rise, 0.0, 1.0);
    const double w = 0.5 * (1.0 - std::cos(std::numbers::pi * s));
    env.samples[i] = std::polar(amplitude, phase_a + (phase_b - phase_a) * w);
  }
  return env;
}

/// One period of a drive that ramps phase_a -> phase_b at `t_up` and back at
/// `t_down`. Suited to spectral propagation, where the record is periodic.
inline ComplexEnvelope make_toggle_envelope(double amplitude, double phase_a, double phase_b,
                                            double t_up, double t_down, double t_switch_rise,
                                            std::size_t n, double dt, double f_carrier) {
  if (!(t_switch_rise > 0.0) || !(t_up + t_switch_rise <= t_down) ||
      !(t_down + t_switch_rise <= static_cast<double>(n) * dt) || t_up < 0.0) {
    throw SignalError("toggle envelope: ramps do not fit in the record");
  }
  ComplexEnvelope env{f_carrier, dt, std::vector<cplx>(n)};
  auto ramp = [&](double t) {
    const double s = std::clamp(t / t_switch_rise, 0.0, 1.0);
    return 0.5 * (1.0 - std::cos(std::numbers::pi * s));
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double t = env.time(i);
    const double w = ramp(t - t_up) - ramp(t - t_down);
    env.samples[i] = std::polar(amplitude, phase_a + (phase_b - phase_a) * w);
  }
  return env;
}

/// Filters `env` in the frequency domain: each DFT bin at baseband offset Δf
/// is multiplied by gains[bin]. `gains` must match the zero-padded length.
inline ComplexEnvelope apply_gains(const ComplexEnvelope& env, std::span<const cplx> gains) {
  const std::size_t n = fft::next_pow2(env.size());
  if (gains.size() != n) throw SignalError("apply_gains: gain vector length mismatch");
  std::vector<cplx> buf(n, cplx{});
  std::copy(env.samples.begin(), env.samples.end(), buf.begin());
  fft::forward(buf);
  for (std::size_t j = 0; j < n; ++j) buf[j] *= gains[j];
  fft::inverse(buf);
  buf.resize(env.size());
  return {env.f_carrier, env.dt, std::move(buf)};
}

/// Absolute frequencies of the DFT bins of the zero-padded envelope grid.
inline std::vector<double> bin_frequencies(const ComplexEnvelope& env) {
  const std::size_t n = fft::next_pow2(env.size());
  std::vector<double> f(n);
  for (std::size_t j = 0; j < n; ++j) f[j] = env.f_carrier + fft::bin_offset(j, n, env.dt);
  return f;
}

inline ComplexEnvelope apply_transfer(const ComplexEnvelope& env, const TransferFunction& h) {
  env.validate();
  if (env.f_carrier - env.nyquist() < h.f_lo || env.f_carrier + env.nyquist() > h.f_hi) {
    throw SignalError("apply_transfer: band overflow, envelope spectrum exceeds transfer support");
  }
  const auto freqs = bin_frequencies(env);
  std::vector<cplx> gains(freqs.size());
  std::transform(freqs.begin(), freqs.end(), gains.begin(), [&](double f) { return h(f); });
  return apply_gains(env, gains);
}

inline ComplexEnvelope superpose(std::span<const ComplexEnvelope> envs) {
  if (envs.empty()) throw SignalError("superpose: no envelopes");
  ComplexEnvelope out = envs.front();
  for (const auto& e : envs.subspan(1)) {
    if (e.f_carrier != out.f_carrier || e.dt != out.dt || e.size() != out.size()) {
      throw SignalError("superpose: mismatched grids");
    }
    for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += e.samples[i];
  }
  return out;
}

/// Square-law detection followed by a single-pole low-pass at `lp_cutoff`.
/// The filter starts settled on the first sample.
inline DetectedTrace diode_detect(const ComplexEnvelope& env, double lp_cutoff,
                                  double responsivity = 1.0) {
  env.validate();
  if (!(lp_cutoff > 0.0) || lp_cutoff >= env.nyquist()) {
    throw SignalError("diode_detect: low-pass cutoff must lie below Nyquist");
  }
  const double alpha = -std::expm1(-2.0 * std::numbers::pi * lp_cutoff * env.dt);
  DetectedTrace trace{env.dt, std::vector<double>(env.size())};
  double state = std::norm(env.samples.front());
  for (std::size_t i = 0; i < env.size(); ++i) {
    state += alpha * (std::norm(env.samples[i]) - state);
    trace.samples[i] = responsivity * state;
  }
  return trace;
}

struct RiseTime {
  double t_rise;   // s
  double f_clock;  // Hz
  double v_max;    // V, settled plateau
  double t_low;    // time of the 1/3 crossing
  double t_high;   // time of the 2/3 crossing
};

/// Fraction of the record, counted from the end, averaged for V_max.
inline constexpr double kPlateauFraction = 0.2;

/// 1/3 to 2/3 rise time. V_max is the mean of the trailing plateau; the
/// interval runs from the last upward 1/3 crossing preceding the first 2/3
/// crossing, with linear interpolation between samples.
inline RiseTime rise_time(const DetectedTrace& trace) {
  const auto& v = trace.samples;
  if (v.size() < 4 || !(trace.dt > 0.0)) throw SignalError("no transition: trace too short");
  const auto tail = std::max<std::size_t>(
      1, static_cast<std::size_t>(kPlateauFraction * static_cast<double>(v.size())));
  const double v_max =
      std::accumulate(v.end() - static_cast<std::ptrdiff_t>(tail), v.end(), 0.0) /
      static_cast<double>(tail);
  if (!(v_max > 0.0) || !std::isfinite(v_max)) throw SignalError("no transition: flat trace");

  const double lo = v_max / 3.0;
  const double hi = 2.0 * v_max / 3.0;
  const auto first_hi =
      std::find_if(v.begin(), v.end(), [&](double x) { return x >= hi; }) - v.begin();
  if (first_hi <= 0 || first_hi == static_cast<std::ptrdiff_t>(v.size())) {
    throw SignalError("no transition: no 2/3 crossing");
  }
  std::ptrdiff_t last_lo = first_hi - 1;
  while (last_lo >= 0 && v[static_cast<std::size_t>(last_lo)] >= lo) --last_lo;
  if (last_lo < 0) throw SignalError("no transition: no 1/3 crossing");

  auto crossing = [&](std::size_t i, double level) {
    const double a = v[i];
    const double b = v[i + 1];
    return trace.time(i) + (level - a) / (b - a) * trace.dt;
  };
  const double t_low = crossing(static_cast<std::size_t>(last_lo), lo);
  const double t_high = crossing(static_cast<std::size_t>(first_hi - 1), hi);
  const double t_rise = t_high - t_low;
  if (!(t_rise > 0.0)) throw SignalError("no transition: non-positive rise");
  return {t_rise, 1.0 / t_rise, v_max, t_low, t_high};
}

/// Argument of the mean complex amplitude over [t0, t1], in (-π, π].
inline double phase_estimate(const ComplexEnvelope& env, double t0, double t1) {
  env.validate();
  if (!(t0 <= t1) || t0 < 0.0 || t1 > env.duration()) {
    throw SignalError("phase_estimate: window outside the record");
  }
  cplx sum{};
  double mag = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    const double t = env.time(i);
    if (t < t0 || t > t1) continue;
    sum += env.samples[i];
    mag += std::abs(env.samples[i]);
    ++count;
  }
  if (count == 0 || mag == 0.0 || std::abs(sum) <= 1e-12 * mag) {
    throw SignalError("indeterminate phase: vanishing amplitude in window");
  }
  const double phi = std::arg(sum);
  return phi <= -std::numbers::pi ? std::numbers::pi : phi;
}

inline void write_csv(std::ostream& os, const DetectedTrace& trace) {
  os << "time_s,value\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    os << fmt::format("{:.9e},{:.9e}\n", trace.time(i), trace.samples[i]);
  }
}

inline void write_csv(std::ostream& os, const ComplexEnvelope& env) {
  os << "time_s,re,im\n";
  for (std::size_t i = 0; i < env.size(); ++i) {
    os << fmt::format("{:.9e},{:.9e},{:.9e}\n", env.time(i), env.samples[i].real(),
                      env.samples[i].imag());
  }
}

}  // namespace swmg::signal
