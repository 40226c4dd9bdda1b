#pragma once

// Phase-encoded majority logic on top of the gate netlist.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "swmg/circuit.hpp"
#include "swmg/error.hpp"

namespace swmg::logic {

using circuit::Channel;
using circuit::GateNetlist;
using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle into (-π, π].
inline double wrap_phase(double phi) {
  double w = std::remainder(phi, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

enum class Decoded { Zero, One, Indeterminate };

inline std::string to_string(Decoded d) {
  switch (d) {
    case Decoded::Zero: return "0";
    case Decoded::One: return "1";
    default: return "X";
  }
}

struct PhaseEncoding {
  double phi0 = 0.0;                  // logic '0'
  double guard = kPi / 2.0 - 0.01;    // decode half-window
  double amplitude_floor = 1e-12;     // readouts below this are indeterminate

  double phi1() const { return phi0 + kPi; }

  void validate() const {
    detail::require(guard > 0.0 && guard <= kPi / 2.0, "encoding: guard must lie in (0, pi/2]");
    detail::require(amplitude_floor >= 0.0, "encoding: amplitude floor must be >= 0");
  }
};

inline bool majority(bool a, bool b, bool c) { return (a && b) || (a && c) || (b && c); }

inline double encode(bool bit, const PhaseEncoding& enc = {}) { return bit ? enc.phi1() : enc.phi0; }

/// Distance from `phase` to the decision boundary (π/2 away from either code
/// phase). Zero on the boundary.
inline double decode_margin(double phase, const PhaseEncoding& enc = {}) {
  const double d0 = std::abs(wrap_phase(phase - enc.phi0));
  return std::abs(kPi / 2.0 - d0);
}

inline Decoded decode(double phase, const PhaseEncoding& enc = {}) {
  const double d0 = std::abs(wrap_phase(phase - enc.phi0));
  const double d1 = std::abs(wrap_phase(phase - enc.phi1()));
  if (d0 <= enc.guard) return Decoded::Zero;
  if (d1 <= enc.guard) return Decoded::One;
  return Decoded::Indeterminate;
}

struct LogicState {
  std::array<bool, 3> bits{};  // i1, i2, i3

  static LogicState parse(const std::string& s) {
    if (s.size() != 3 || s.find_first_not_of("01") != std::string::npos) {
      throw ConfigError("logic state must be three binary digits, got '" + s + "'");
    }
    return {{s[0] == '1', s[1] == '1', s[2] == '1'}};
  }
  std::string str() const {
    std::string s;
    for (bool b : bits) s += b ? '1' : '0';
    return s;
  }
  bool majority() const { return logic::majority(bits[0], bits[1], bits[2]); }
  bool unanimous() const { return bits[0] == bits[1] && bits[1] == bits[2]; }
};

/// Input states in the row order of the majority truth table.
inline const std::array<LogicState, 8>& table_order() {
  static const std::array<LogicState, 8> rows{
      LogicState::parse("000"), LogicState::parse("001"), LogicState::parse("010"),
      LogicState::parse("100"), LogicState::parse("101"), LogicState::parse("110"),
      LogicState::parse("011"), LogicState::parse("111")};
  return rows;
}

struct GateReadout {
  double amplitude = 0.0;
  double phase = 0.0;  // rad, relative to the i2 logic-0 reference
  Decoded decoded = Decoded::Indeterminate;
  double margin = 0.0;
};

/// Complex output at the carrier for per-channel shifter phases.
inline cplx carrier_output(const GateNetlist& n, const std::array<double, 3>& shifter,
                           const std::array<bool, 3>& active = {true, true, true}) {
  const auto carrier = circuit::mode_point(n.physics, n.f_carrier);
  cplx out{};
  for (Channel ch : circuit::kChannels) {
    const auto i = circuit::index(ch);
    if (!active[i]) continue;
    out += circuit::channel_transfer(n.with_phase(ch, shifter[i]), ch, carrier, carrier);
  }
  return out;
}

/// Output phase of the reference channel i2 alone with its shifter at its
/// trim. Read-out phases are measured against it.
inline double reference_phase(const GateNetlist& n) {
  const cplx ref = carrier_output(n, n.phase_trim, {false, true, false});
  if (std::abs(ref) == 0.0) throw BandError("reference channel i2 has no transmission");
  return std::arg(ref);
}

inline GateReadout read_output(cplx out, double reference, const PhaseEncoding& enc) {
  GateReadout r;
  r.amplitude = std::abs(out);
  r.phase = wrap_phase(std::arg(out) - reference);
  if (r.amplitude <= enc.amplitude_floor) {
    r.decoded = Decoded::Indeterminate;
    r.margin = 0.0;
    return r;
  }
  r.decoded = decode(r.phase, enc);
  r.margin = r.decoded == Decoded::Indeterminate ? 0.0 : decode_margin(r.phase, enc);
  return r;
}

/// Drives every input with an equal-amplitude carrier whose phase encodes
/// the state (plus calibration trim) and reads the superposed output.
inline GateReadout run_logic_state(const GateNetlist& n, const LogicState& state,
                                   const PhaseEncoding& enc = {}) {
  enc.validate();
  std::array<double, 3> shifter{};
  for (std::size_t i = 0; i < 3; ++i) shifter[i] = n.phase_trim[i] + encode(state.bits[i], enc);
  return read_output(carrier_output(n, shifter), reference_phase(n), enc);
}

struct CascadeCheck {
  bool cascadable;
  double spread;  // max/min output amplitude
};

inline CascadeCheck cascade_check(std::span<const GateReadout> readouts, double tolerance = 1.5) {
  if (readouts.size() < 2) throw ConfigError("cascade_check: need at least two readouts");
  const auto [lo, hi] = std::minmax_element(
      readouts.begin(), readouts.end(),
      [](const GateReadout& a, const GateReadout& b) { return a.amplitude < b.amplitude; });
  const double spread = lo->amplitude > 0.0 ? hi->amplitude / lo->amplitude
                                             : std::numeric_limits<double>::infinity();
  return {spread <= tolerance, spread};
}

struct AdderBits {
  bool sum;
  bool cout;
};

/// Majority-only full adder: cout = M(a,b,cin), sum = M(!cout, M(a,b,!cin), cin).
inline AdderBits full_adder(bool a, bool b, bool cin) {
  const bool cout = majority(a, b, cin);
  const bool sum = majority(!cout, majority(a, b, !cin), cin);
  return {sum, cout};
}

struct TruthRow {
  LogicState state;
  std::array<double, 3> in_phases{};
  GateReadout readout;
  bool expected;
};

struct TruthTable {
  std::vector<TruthRow> rows;
  bool any_indeterminate = false;
  bool all_correct = true;
  // Output amplitudes deviate from the ideal {A, 3A} pattern by more than 10%.
  bool miscalibrated = false;
  double min_margin = 0.0;
  double amplitude_ratio = 0.0;  // mean unanimous / mean majority-2:1 amplitude
};

inline TruthTable truth_table(const GateNetlist& n, const PhaseEncoding& enc = {}) {
  TruthTable t;
  double sum_unanimous = 0.0;
  double sum_split = 0.0;
  double min_split = std::numeric_limits<double>::infinity();
  double max_split = 0.0;
  t.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& state : table_order()) {
    TruthRow row{state, {}, run_logic_state(n, state, enc), state.majority()};
    for (std::size_t i = 0; i < 3; ++i) row.in_phases[i] = encode(state.bits[i], enc);
    const auto& r = row.readout;
    if (r.decoded == Decoded::Indeterminate) t.any_indeterminate = true;
    const Decoded want = row.expected ? Decoded::One : Decoded::Zero;
    if (r.decoded != want) t.all_correct = false;
    t.min_margin = std::min(t.min_margin, r.margin);
    if (state.unanimous()) {
      sum_unanimous += r.amplitude;
    } else {
      sum_split += r.amplitude;
      min_split = std::min(min_split, r.amplitude);
      max_split = std::max(max_split, r.amplitude);
    }
    t.rows.push_back(row);
  }
  const double mean_unanimous = sum_unanimous / 2.0;
  const double mean_split = sum_split / 6.0;
  t.amplitude_ratio = mean_split > 0.0 ? mean_unanimous / mean_split
                                       : std::numeric_limits<double>::infinity();
  t.miscalibrated = !(max_split <= 1.1 * min_split) || std::abs(t.amplitude_ratio - 3.0) > 0.3;
  return t;
}

struct AdderRow {
  bool a = false, b = false, cin = false;
  AdderBits gate{};                      // decoded through three gate evaluations
  AdderBits expected{};                  // binary addition
  std::array<GateReadout, 3> readouts{};  // carry gate, inner gate, sum gate
  bool match = false;
  double amplitude_spread = 0.0;
};

inline bool decoded_bit(const GateReadout& r) {
  if (r.decoded == Decoded::Indeterminate) {
    throw IndeterminateError("full adder: gate output indeterminate");
  }
  return r.decoded == Decoded::One;
}

/// Evaluates the majority full adder with each majority realized by one run
/// of the gate. Inversion is a π shift on the re-encoded input.
inline AdderRow full_adder_on_gate(const GateNetlist& n, bool a, bool b, bool cin,
                                   const PhaseEncoding& enc = {}) {
  AdderRow row;
  row.a = a, row.b = b, row.cin = cin;
  row.readouts[0] = run_logic_state(n, LogicState{{a, b, cin}}, enc);
  const bool cout = decoded_bit(row.readouts[0]);
  row.readouts[1] = run_logic_state(n, LogicState{{a, b, !cin}}, enc);
  const bool inner = decoded_bit(row.readouts[1]);
  row.readouts[2] = run_logic_state(n, LogicState{{!cout, inner, cin}}, enc);
  row.gate = {decoded_bit(row.readouts[2]), cout};
  const int total = int(a) + int(b) + int(cin);
  row.expected = {(total & 1) != 0, total >= 2};
  row.match = row.gate.sum == row.expected.sum && row.gate.cout == row.expected.cout;
  row.amplitude_spread = cascade_check(row.readouts).spread;
  return row;
}

}  // namespace swmg::logic
