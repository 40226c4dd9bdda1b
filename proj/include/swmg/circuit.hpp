#pragma once

// Two-port netlist of the three-input gate: microwave conditioning per
// channel, stripline transducers, waveguide arms with skew bends, the
// combiner and the shared output arm.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "swmg/error.hpp"
#include "swmg/kv.hpp"
#include "swmg/physics.hpp"

namespace swmg::circuit {

using cplx = std::complex<double>;

enum class Channel { i1 = 0, i2 = 1, i3 = 2 };
inline constexpr std::array<Channel, 3> kChannels{Channel::i1, Channel::i2, Channel::i3};

inline std::size_t index(Channel ch) { return static_cast<std::size_t>(ch); }
inline std::string name(Channel ch) { return "i" + std::to_string(index(ch) + 1); }

inline Channel parse_channel(const std::string& s) {
  if (s == "i1") return Channel::i1;
  if (s == "i2") return Channel::i2;
  if (s == "i3") return Channel::i3;
  throw ConfigError("unknown channel '" + s + "'");
}

struct DeviceGeometry {
  double w_g = 1.5e-3;  // waveguide width (m)
  double w_a = 75e-6;   // stripline antenna width (m)
  std::array<double, 3> L_in{10e-3, 10e-3, 10e-3};
  std::array<double, 3> L_skew{6e-3, 0.0, 6e-3};
  double L_out = 10e-3;
  double bend_loss_dB = 3.0;
  // Multiplies every propagation length. Widths are cross-section
  // dimensions and stay fixed.
  double scale = 1.0;

  void validate() const {
    detail::require(w_g > 0.0 && w_a > 0.0, "geometry: widths must be positive");
    for (double l : L_in) detail::require(l >= 0.0, "geometry: L_in must be non-negative");
    for (double l : L_skew) detail::require(l >= 0.0, "geometry: L_skew must be non-negative");
    detail::require(L_out >= 0.0, "geometry: L_out must be non-negative");
    detail::require(bend_loss_dB >= 0.0, "geometry: bend loss must be non-negative");
    detail::require(scale > 0.0, "geometry: scale must be positive");
  }

  /// Physical length of the i2 arm plus the output arm, after scaling.
  double i2_path_length() const { return scale * (L_in[1] + L_skew[1] + L_out); }
};

// --- components -----------------------------------------------------------

struct Source {};
struct Splitter {
  int ways = 3;
};
struct Attenuator {
  double dB = 0.0;
};
struct PhaseShifter {
  double phase = 0.0;  // rad
};
struct Switch {
  bool through_delay = false;
};
struct DelayLine {
  double phase_at_fc = std::numbers::pi;  // rad of lag at the carrier
};
struct TransducerIn {
  cplx coupling{1.0, 0.0};
};
struct WaveguideSegment {
  double length = 0.0;  // m, already scaled
};
struct Bend {
  double loss_dB = 0.0;
};
struct Combiner {};
struct TransducerOut {
  cplx coupling{1.0, 0.0};
};
struct DiodeDetector {
  double responsivity = 1.0;
  double lp_cutoff = 500e6;
};

using Component = std::variant<Source, Splitter, Attenuator, PhaseShifter, Switch, DelayLine,
                               TransducerIn, WaveguideSegment, Bend, Combiner, TransducerOut,
                               DiodeDetector>;

inline std::string kind_name(const Component& c) {
  static constexpr std::array<const char*, 12> names{
      "Source",       "Splitter",         "Attenuator", "PhaseShifter",
      "Switch",       "DelayLine",        "TransducerIn", "WaveguideSegment",
      "Bend",         "Combiner",         "TransducerOut", "DiodeDetector"};
  return names[c.index()];
}

using Chain = std::vector<Component>;

// --- propagation at one frequency -----------------------------------------

/// Spin-wave state at frequency f. Out of band means no propagating mode.
struct ModePoint {
  double f = 0.0;
  bool in_band = false;
  double k = 0.0;
  double v_g = 0.0;
};

inline ModePoint mode_point(const physics::ModeContext& ctx, double f) {
  ModePoint m{f};
  if (!physics::propagating_band(ctx).contains(f)) return m;
  m.in_band = true;
  m.k = physics::solve_k(ctx, f);
  m.v_g = physics::group_velocity(ctx, m.k);
  return m;
}

inline double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

/// Stripline excitation/pickup selectivity, coupling·sinc(k·w_a/2). Zero
/// where no mode propagates.
inline cplx transducer_efficiency(const ModePoint& m, const DeviceGeometry& g,
                                  cplx coupling = 1.0) {
  if (!m.in_band) return 0.0;
  return coupling * sinc(0.5 * m.k * g.w_a);
}

inline cplx transducer_efficiency(const physics::ModeContext& ctx, const DeviceGeometry& g,
                                  double f, cplx coupling = 1.0) {
  return transducer_efficiency(mode_point(ctx, f), g, coupling);
}

/// Propagation over length L, referenced to a carrier with mode `carrier`:
///   exp(-i k_c L) · exp(-i 2π (f - f_c) L/|v_g(f)|) · exp(-η L/|v_g(f)|).
inline cplx waveguide_transfer(const physics::ModeContext& ctx, double L, const ModePoint& m,
                               const ModePoint& carrier) {
  if (L == 0.0) return 1.0;
  if (!m.in_band) return 0.0;
  if (!carrier.in_band) throw BandError("no propagating mode at the carrier frequency");
  const double slowness = 1.0 / std::abs(m.v_g);
  const double phase =
      -carrier.k * L - 2.0 * std::numbers::pi * (m.f - carrier.f) * L * slowness;
  return std::polar(std::exp(-physics::damping_rate(ctx) * L * slowness), phase);
}

inline cplx waveguide_transfer(const physics::ModeContext& ctx, double L, double f,
                               double f_carrier) {
  if (L == 0.0) return 1.0;
  return waveguide_transfer(ctx, L, mode_point(ctx, f), mode_point(ctx, f_carrier));
}

// --- netlist --------------------------------------------------------------

struct MicrowaveSettings {
  double f_carrier = 6.035e9;
  std::array<double, 3> attenuation_dB{0.0, 0.0, 0.0};
  // Phase-shifter trims that align each channel's logic '0' with i2.
  std::array<double, 3> phase_trim_rad{0.0, 0.0, 0.0};
  // Per-antenna coupling constants; differing values model unequal
  // excitation efficiencies.
  std::array<cplx, 3> coupling_in{cplx{1.0}, cplx{1.0}, cplx{1.0}};
  cplx coupling_out{1.0};
  // Direct electromagnetic input-to-output pickup, bypassing the spin waves.
  std::array<cplx, 3> crosstalk{};
  bool with_switch = false;  // Switch + DelayLine in i2
  double delay_phase = std::numbers::pi;
  double diode_lp_cutoff = 500e6;
  double diode_responsivity = 1.0;

  void validate() const {
    detail::require(f_carrier > 0.0, "microwave: carrier frequency must be positive");
    for (double a : attenuation_dB) detail::require(a >= 0.0, "microwave: attenuation must be >= 0 dB");
    detail::require(diode_lp_cutoff > 0.0, "microwave: diode cutoff must be positive");
  }
};

struct GateNetlist {
  std::array<Chain, 3> inputs;
  Chain output;
  DeviceGeometry geometry;
  physics::ModeContext physics;
  double f_carrier = 6.035e9;
  std::array<cplx, 3> crosstalk{};
  std::array<double, 3> phase_trim{};  // rad, added to every encoded phase

  Chain& chain(Channel ch) { return inputs[index(ch)]; }
  const Chain& chain(Channel ch) const { return inputs[index(ch)]; }

  template <class T>
  T* find(Channel ch) {
    for (auto& c : chain(ch)) {
      if (auto* p = std::get_if<T>(&c)) return p;
    }
    return nullptr;
  }
  template <class T>
  const T* find(Channel ch) const {
    return const_cast<GateNetlist*>(this)->find<T>(ch);
  }
  template <class T>
  const T* find_output() const {
    for (const auto& c : output) {
      if (auto* p = std::get_if<T>(&c)) return p;
    }
    return nullptr;
  }

  double attenuation(Channel ch) const { return find<Attenuator>(ch)->dB; }
  double phase(Channel ch) const { return find<PhaseShifter>(ch)->phase; }

  GateNetlist with_attenuation(Channel ch, double dB) const {
    detail::require(dB >= 0.0, "attenuation must be >= 0 dB");
    GateNetlist n = *this;
    n.find<Attenuator>(ch)->dB = dB;
    return n;
  }
  GateNetlist with_phase(Channel ch, double phase) const {
    GateNetlist n = *this;
    n.find<PhaseShifter>(ch)->phase = phase;
    return n;
  }
  GateNetlist with_input_coupling(Channel ch, cplx coupling) const {
    GateNetlist n = *this;
    n.find<TransducerIn>(ch)->coupling = coupling;
    return n;
  }
  /// Copy with every propagation length rescaled to geometry scale `s`.
  GateNetlist with_scale(double s) const {
    detail::require(s > 0.0, "scale must be positive");
    GateNetlist n = *this;
    const double ratio = s / geometry.scale;
    n.geometry.scale = s;
    auto rescale = [ratio](Chain& c) {
      for (auto& comp : c) {
        if (auto* seg = std::get_if<WaveguideSegment>(&comp)) seg->length *= ratio;
      }
    };
    for (auto& c : n.inputs) rescale(c);
    rescale(n.output);
    return n;
  }
  bool has_switch() const { return find<Switch>(Channel::i2) != nullptr; }
  GateNetlist with_switch_state(bool through_delay) const {
    GateNetlist n = *this;
    auto* sw = n.find<Switch>(Channel::i2);
    if (sw == nullptr) throw ConfigError("netlist has no switch on i2");
    sw->through_delay = through_delay;
    return n;
  }
};

/// Assembles the gate. Each input chain runs
/// Source, Splitter, Attenuator, PhaseShifter, [Switch, DelayLine on i2],
/// TransducerIn, arm segment, [Bend, skew segment], Combiner;
/// the output chain runs output segment, TransducerOut, DiodeDetector.
inline GateNetlist build_majority_gate(const DeviceGeometry& geometry,
                                       const physics::ModeContext& ctx,
                                       const MicrowaveSettings& mw = {}) {
  geometry.validate();
  mw.validate();
  GateNetlist n;
  n.geometry = geometry;
  n.physics = ctx;
  n.f_carrier = mw.f_carrier;
  n.crosstalk = mw.crosstalk;
  n.phase_trim = mw.phase_trim_rad;
  for (Channel ch : kChannels) {
    const auto i = index(ch);
    Chain& c = n.chain(ch);
    c.emplace_back(Source{});
    c.emplace_back(Splitter{3});
    c.emplace_back(Attenuator{mw.attenuation_dB[i]});
    c.emplace_back(PhaseShifter{mw.phase_trim_rad[i]});
    if (ch == Channel::i2 && mw.with_switch) {
      c.emplace_back(Switch{false});
      c.emplace_back(DelayLine{mw.delay_phase});
    }
    c.emplace_back(TransducerIn{mw.coupling_in[i]});
    c.emplace_back(WaveguideSegment{geometry.scale * geometry.L_in[i]});
    if (geometry.L_skew[i] > 0.0) {
      c.emplace_back(Bend{geometry.bend_loss_dB});
      c.emplace_back(WaveguideSegment{geometry.scale * geometry.L_skew[i]});
    }
    c.emplace_back(Combiner{});
  }
  n.output.emplace_back(WaveguideSegment{geometry.scale * geometry.L_out});
  n.output.emplace_back(TransducerOut{mw.coupling_out});
  n.output.emplace_back(DiodeDetector{mw.diode_responsivity, mw.diode_lp_cutoff});
  return n;
}

namespace detail {

struct ChainGain {
  cplx microwave{1.0};  // product up to the input transducer
  cplx total{1.0};      // product of every element
};

inline ChainGain chain_gain(const GateNetlist& n, const Chain& chain, const ModePoint& m,
                            const ModePoint& carrier, ChainGain acc = {}) {
  bool delay_selected = true;
  bool past_transducer = false;
  for (const auto& comp : chain) {
    const cplx g = std::visit(
        [&](const auto& c) -> cplx {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, Splitter>) {
            return 1.0 / std::sqrt(static_cast<double>(c.ways));
          } else if constexpr (std::is_same_v<T, Attenuator>) {
            return std::pow(10.0, -c.dB / 20.0);
          } else if constexpr (std::is_same_v<T, PhaseShifter>) {
            return std::polar(1.0, c.phase);
          } else if constexpr (std::is_same_v<T, Switch>) {
            delay_selected = c.through_delay;
            return 1.0;
          } else if constexpr (std::is_same_v<T, DelayLine>) {
            if (!delay_selected) return 1.0;
            return std::polar(1.0, -c.phase_at_fc * m.f / n.f_carrier);
          } else if constexpr (std::is_same_v<T, TransducerIn>) {
            past_transducer = true;
            return transducer_efficiency(m, n.geometry, c.coupling);
          } else if constexpr (std::is_same_v<T, TransducerOut>) {
            return transducer_efficiency(m, n.geometry, c.coupling);
          } else if constexpr (std::is_same_v<T, WaveguideSegment>) {
            return waveguide_transfer(n.physics, c.length, m, carrier);
          } else if constexpr (std::is_same_v<T, Bend>) {
            return std::pow(10.0, -c.loss_dB / 20.0);
          } else {
            return 1.0;
          }
        },
        comp);
    if (!past_transducer) acc.microwave *= g;
    acc.total *= g;
  }
  return acc;
}

}  // namespace detail

/// Gain from the source through channel `ch` and the shared output arm at
/// frequency m.f, with the spin-wave phase referenced to `carrier`.
inline cplx channel_transfer(const GateNetlist& n, Channel ch, const ModePoint& m,
                             const ModePoint& carrier) {
  const auto in = detail::chain_gain(n, n.chain(ch), m, carrier);
  const auto out = detail::chain_gain(n, n.output, m, carrier);
  return in.total * out.total + in.microwave * n.crosstalk[index(ch)];
}

inline cplx channel_transfer(const GateNetlist& n, Channel ch, double f) {
  return channel_transfer(n, ch, mode_point(n.physics, f), mode_point(n.physics, n.f_carrier));
}

/// Continuous-wave gain at f: the tone is its own carrier.
inline cplx cw_transfer(const GateNetlist& n, Channel ch, double f) {
  const auto m = mode_point(n.physics, f);
  return channel_transfer(n, ch, m, m);
}

/// Per-bin channel gains for a list of absolute frequencies, sharing the
/// dispersion solve across channels.
inline std::array<std::vector<cplx>, 3> channel_gains(const GateNetlist& n,
                                                      std::span<const double> freqs) {
  const auto carrier = mode_point(n.physics, n.f_carrier);
  std::array<std::vector<cplx>, 3> out;
  for (auto& v : out) v.resize(freqs.size());
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    const auto m = mode_point(n.physics, freqs[j]);
    for (Channel ch : kChannels) out[index(ch)][j] = channel_transfer(n, ch, m, carrier);
  }
  return out;
}

struct SpectrumPoint {
  double f;   // Hz
  double dB;  // 20 log10 |S21|
};

inline std::vector<SpectrumPoint> transmission_spectrum(const GateNetlist& n, Channel ch,
                                                        std::span<const double> f_grid,
                                                        double floor_dB = -80.0) {
  for (std::size_t j = 1; j < f_grid.size(); ++j) {
    if (!(f_grid[j] > f_grid[j - 1])) throw ConfigError("transmission: frequency grid must ascend");
  }
  std::vector<SpectrumPoint> out;
  out.reserve(f_grid.size());
  for (double f : f_grid) {
    const double mag = std::abs(cw_transfer(n, ch, f));
    const double dB = mag > 0.0 ? 20.0 * std::log10(mag) : floor_dB;
    out.push_back({f, std::max(dB, floor_dB)});
  }
  return out;
}

// --- serialization --------------------------------------------------------

namespace detail {

inline void put_complex(kv::Document& doc, const std::string& key, cplx v) {
  doc.set(key + ".re", v.real());
  doc.set(key + ".im", v.imag());
}

inline void dump_chain(kv::Document& doc, const std::string& prefix, const Chain& chain) {
  for (std::size_t j = 0; j < chain.size(); ++j) {
    const auto key = fmt::format("{}.component[{}]", prefix, j);
    doc.set(key + ".kind", kind_name(chain[j]));
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, Splitter>) doc.set(key + ".ways", c.ways);
          if constexpr (std::is_same_v<T, Attenuator>) doc.set(key + ".dB", c.dB);
          if constexpr (std::is_same_v<T, PhaseShifter>) doc.set(key + ".phase_rad", c.phase);
          if constexpr (std::is_same_v<T, Switch>) doc.set(key + ".through_delay", c.through_delay);
          if constexpr (std::is_same_v<T, DelayLine>) doc.set(key + ".phase_at_fc_rad", c.phase_at_fc);
          if constexpr (std::is_same_v<T, TransducerIn> || std::is_same_v<T, TransducerOut>) {
            put_complex(doc, key + ".coupling", c.coupling);
          }
          if constexpr (std::is_same_v<T, WaveguideSegment>) doc.set(key + ".length_m", c.length);
          if constexpr (std::is_same_v<T, Bend>) doc.set(key + ".loss_dB", c.loss_dB);
          if constexpr (std::is_same_v<T, DiodeDetector>) {
            doc.set(key + ".responsivity", c.responsivity);
            doc.set(key + ".lp_cutoff_Hz", c.lp_cutoff);
          }
        },
        chain[j]);
  }
}

}  // namespace detail

/// Key-value dump of the netlist: geometry.*, carrier, and every component as
/// channel.iN.component[j].kind plus its parameters.
inline kv::Document serialize(const GateNetlist& n) {
  kv::Document doc;
  const auto& g = n.geometry;
  doc.set("geometry.w_g", g.w_g);
  doc.set("geometry.w_a", g.w_a);
  for (std::size_t i = 0; i < 3; ++i) {
    doc.set(fmt::format("geometry.L_in.{}", i + 1), g.L_in[i]);
    doc.set(fmt::format("geometry.L_skew.{}", i + 1), g.L_skew[i]);
  }
  doc.set("geometry.L_out", g.L_out);
  doc.set("geometry.bend_loss_dB", g.bend_loss_dB);
  doc.set("geometry.scale", g.scale);
  doc.set("f_carrier_Hz", n.f_carrier);
  for (Channel ch : kChannels) {
    detail::dump_chain(doc, "channel." + name(ch), n.chain(ch));
    detail::put_complex(doc, "channel." + name(ch) + ".crosstalk", n.crosstalk[index(ch)]);
    doc.set("channel." + name(ch) + ".phase_trim_rad", n.phase_trim[index(ch)]);
  }
  detail::dump_chain(doc, "output", n.output);
  return doc;
}

}  // namespace swmg::circuit
