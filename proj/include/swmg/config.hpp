#pragma once

// Run configuration: one flat key-value document covering film, field,
// geometry, microwave settings and per-experiment parameters. Unknown keys
// are rejected; serialization writes every key so files round-trip.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "swmg/circuit.hpp"
#include "swmg/error.hpp"
#include "swmg/experiment.hpp"
#include "swmg/kv.hpp"
#include "swmg/logic.hpp"
#include "swmg/physics.hpp"

namespace swmg::config {

struct RunConfig {
  // film
  std::string film_preset = "YIG-5.4um";
  double mu0Ms = 0.176;             // T, used when fmr_target == 0
  double fmr_target = 6.06e9;       // Hz, > 0 fits Ms to this FMR
  double thickness = 5.4e-6;        // m
  double gamma = physics::kTwoPi * 28.0e9;
  double linewidth = 6.2e-5;        // T
  // field
  double mu0H = 0.1429;             // T
  physics::Orientation orientation = physics::Orientation::Parallel;

  circuit::DeviceGeometry geometry;
  // Microwave settings; the per-antenna couplings below replace
  // microwave.coupling_in / coupling_out when the netlist is built.
  circuit::MicrowaveSettings microwave;
  std::array<double, 3> coupling_dB{-1.0, 0.0, -2.0};  // unequal antenna efficiencies
  std::array<double, 3> coupling_phase{};  // rad
  double coupling_out_dB = 0.0;
  logic::PhaseEncoding encoding;
  bool auto_calibrate = true;
  double cascade_tolerance = 1.5;

  // dispersion table
  double k_min = 1e1, k_max = 1e6;
  int k_points = 200;
  // transmission spectra
  double f_min = 3.9e9, f_max = 6.2e9;
  int f_points = 461;
  double floor_dB = -80.0;
  // switching experiment
  double switch_dt = 0.1e-9;
  double switch_ramp = 2e-9;
  bool switch_toggle = true;
  double switch_ref_phase = std::numbers::pi;
  double switch_target_rise = 11.3e-9;
  double switch_l_eff = 0.0;        // m, > 0 skips the fit
  // scaling study
  std::vector<double> scale_factors{1.0, 0.5, 0.2, 0.1, 0.05};

  std::string out_dir = "out";

  void validate() const;
  physics::ModeContext mode_context() const;
  circuit::GateNetlist netlist(bool with_switch = false) const;
  experiment::SwitchTiming switch_timing() const;

  kv::Document to_document() const;
  static RunConfig from_document(const kv::Document& doc);
};

namespace detail {

inline std::string mode_name(physics::Orientation o) {
  return o == physics::Orientation::Parallel ? "bvmsw" : "mssw";
}

inline physics::Orientation parse_mode(const std::string& s) {
  if (s == "bvmsw") return physics::Orientation::Parallel;
  if (s == "mssw") return physics::Orientation::Perpendicular;
  throw ConfigError("unknown mode '" + s + "' (expected bvmsw or mssw)");
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += kv::Document::format_double(v[i]);
  }
  return s;
}

inline std::vector<double> split_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b == std::string::npos) throw ConfigError("key '" + key + "': empty list item");
    out.push_back(kv::Document::parse_double(key, item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

inline std::complex<double> from_dB(double dB, double phase) {
  return std::polar(std::pow(10.0, dB / 20.0), phase);
}

// Binds every key to a reader and a writer so the two directions stay in
// step.
class Binder {
 public:
  using Reader = std::function<void(const std::string& key, const std::string& value)>;
  using Writer = std::function<std::string()>;

  void bind(const std::string& key, double& ref) {
    readers_[key] = [&ref](const std::string& k, const std::string& v) {
      ref = kv::Document::parse_double(k, v);
    };
    writers_[key] = [&ref] { return kv::Document::format_double(ref); };
  }
  void bind(const std::string& key, int& ref) {
    readers_[key] = [&ref](const std::string& k, const std::string& v) {
      const double d = kv::Document::parse_double(k, v);
      if (d != std::floor(d)) throw ConfigError("key '" + k + "': expected an integer");
      ref = static_cast<int>(d);
    };
    writers_[key] = [&ref] { return std::to_string(ref); };
  }
  void bind(const std::string& key, bool& ref) {
    readers_[key] = [&ref](const std::string& k, const std::string& v) {
      ref = kv::Document::parse_bool(k, v);
    };
    writers_[key] = [&ref] { return std::string(ref ? "true" : "false"); };
  }
  void bind(const std::string& key, std::string& ref) {
    readers_[key] = [&ref](const std::string&, const std::string& v) { ref = v; };
    writers_[key] = [&ref] { return ref; };
  }
  void bind(const std::string& key, Reader r, Writer w) {
    readers_[key] = std::move(r);
    writers_[key] = std::move(w);
  }

  void read(const kv::Document& doc) const {
    for (const auto& [k, v] : doc.entries()) {
      auto it = readers_.find(k);
      if (it == readers_.end()) throw ConfigError("unknown config key '" + k + "'");
      it->second(k, v);
    }
  }
  kv::Document write() const {
    kv::Document doc;
    for (const auto& [k, w] : writers_) doc.set(k, w());
    return doc;
  }

 private:
  std::map<std::string, Reader> readers_;
  std::map<std::string, Writer> writers_;
};

inline void bind_all(Binder& b, RunConfig& c) {
  b.bind("film.preset", c.film_preset);
  b.bind("film.mu0Ms_T", c.mu0Ms);
  b.bind("film.fmr_target_Hz", c.fmr_target);
  b.bind("film.thickness_m", c.thickness);
  b.bind("film.gamma_rad_per_sT", c.gamma);
  b.bind("film.linewidth_T", c.linewidth);
  b.bind("field.mu0H_T", c.mu0H);
  b.bind(
      "field.mode", [&c](const std::string&, const std::string& v) { c.orientation = parse_mode(v); },
      [&c] { return mode_name(c.orientation); });

  auto& g = c.geometry;
  b.bind("geometry.w_g_m", g.w_g);
  b.bind("geometry.w_a_m", g.w_a);
  for (std::size_t i = 0; i < 3; ++i) {
    b.bind(fmt::format("geometry.L_in_m.{}", i + 1), g.L_in[i]);
    b.bind(fmt::format("geometry.L_skew_m.{}", i + 1), g.L_skew[i]);
  }
  b.bind("geometry.L_out_m", g.L_out);
  b.bind("geometry.bend_loss_dB", g.bend_loss_dB);
  b.bind("geometry.scale", g.scale);

  auto& mw = c.microwave;
  b.bind("microwave.f_carrier_Hz", mw.f_carrier);
  b.bind("microwave.delay_phase_rad", mw.delay_phase);
  b.bind("diode.lp_cutoff_Hz", mw.diode_lp_cutoff);
  b.bind("diode.responsivity", mw.diode_responsivity);
  b.bind("microwave.coupling_out_dB", c.coupling_out_dB);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto p = fmt::format("microwave.i{}.", i + 1);
    b.bind(p + "attenuation_dB", mw.attenuation_dB[i]);
    b.bind(p + "phase_trim_rad", mw.phase_trim_rad[i]);
    b.bind(p + "coupling_dB", c.coupling_dB[i]);
    b.bind(p + "coupling_phase_rad", c.coupling_phase[i]);
    auto& xt = mw.crosstalk[i];
    b.bind(
        p + "crosstalk_re",
        [&xt](const std::string& k, const std::string& v) {
          xt.real(kv::Document::parse_double(k, v));
        },
        [&xt] { return kv::Document::format_double(xt.real()); });
    b.bind(
        p + "crosstalk_im",
        [&xt](const std::string& k, const std::string& v) {
          xt.imag(kv::Document::parse_double(k, v));
        },
        [&xt] { return kv::Document::format_double(xt.imag()); });
  }

  b.bind("logic.phi0_rad", c.encoding.phi0);
  b.bind("logic.guard_rad", c.encoding.guard);
  b.bind("logic.amplitude_floor", c.encoding.amplitude_floor);
  b.bind("calibrate.auto", c.auto_calibrate);
  b.bind("cascade.tolerance", c.cascade_tolerance);

  b.bind("dispersion.k_min_rad_per_m", c.k_min);
  b.bind("dispersion.k_max_rad_per_m", c.k_max);
  b.bind("dispersion.points", c.k_points);
  b.bind("transmission.f_min_Hz", c.f_min);
  b.bind("transmission.f_max_Hz", c.f_max);
  b.bind("transmission.points", c.f_points);
  b.bind("transmission.floor_dB", c.floor_dB);

  b.bind("switch.dt_s", c.switch_dt);
  b.bind("switch.ramp_s", c.switch_ramp);
  b.bind("switch.toggle", c.switch_toggle);
  b.bind("switch.ref_phase_rad", c.switch_ref_phase);
  b.bind("switch.target_rise_s", c.switch_target_rise);
  b.bind("switch.l_eff_m", c.switch_l_eff);
  b.bind(
      "scale.factors",
      [&c](const std::string& k, const std::string& v) { c.scale_factors = split_doubles(k, v); },
      [&c] { return join(c.scale_factors); });
  b.bind("output.dir", c.out_dir);
}

}  // namespace detail

inline void RunConfig::validate() const {
  using swmg::detail::require;
  require(film_preset == "YIG-5.4um", "film.preset: only 'YIG-5.4um' is known");
  require(mu0Ms >= 0.0, "film.mu0Ms_T must be >= 0");
  require(fmr_target >= 0.0, "film.fmr_target_Hz must be >= 0");
  mode_context();
  geometry.validate();
  microwave.validate();
  encoding.validate();
  require(cascade_tolerance >= 1.0, "cascade.tolerance must be >= 1");
  require(k_min > 0.0 && k_max > k_min && k_points >= 2, "dispersion grid is invalid");
  require(f_min > 0.0 && f_max > f_min && f_points >= 2, "transmission grid is invalid");
  require(switch_dt > 0.0 && switch_ramp > 0.0, "switch timing must be positive");
  require(switch_target_rise > 0.0, "switch.target_rise_s must be positive");
  require(switch_l_eff >= 0.0, "switch.l_eff_m must be >= 0");
  for (double s : scale_factors) require(s > 0.0, "scale.factors must be positive");
}

inline physics::ModeContext RunConfig::mode_context() const {
  physics::FilmParams film;
  film.label = film_preset;
  film.d = thickness;
  film.gamma = gamma;
  film.deltaH0 = linewidth;
  film.Ms = mu0Ms / physics::kMu0;
  const physics::BiasField field{mu0H, orientation};
  physics::ModeContext ctx(film, field);
  if (fmr_target > 0.0) {
    film.Ms = physics::calibrate_Ms(ctx, fmr_target);
    ctx = physics::ModeContext(film, field);
  }
  return ctx;
}

inline circuit::GateNetlist RunConfig::netlist(bool with_switch) const {
  auto mw = microwave;
  mw.with_switch = with_switch;
  for (std::size_t i = 0; i < 3; ++i) mw.coupling_in[i] = detail::from_dB(coupling_dB[i], coupling_phase[i]);
  mw.coupling_out = detail::from_dB(coupling_out_dB, 0.0);
  return circuit::build_majority_gate(geometry, mode_context(), mw);
}

inline experiment::SwitchTiming RunConfig::switch_timing() const {
  experiment::SwitchTiming t;
  t.dt = switch_dt;
  t.switch_rise = switch_ramp;
  t.toggle = switch_toggle;
  return t;
}

inline kv::Document RunConfig::to_document() const {
  RunConfig copy = *this;
  detail::Binder b;
  detail::bind_all(b, copy);
  return b.write();
}

inline RunConfig RunConfig::from_document(const kv::Document& doc) {
  RunConfig c;
  detail::Binder b;
  detail::bind_all(b, c);
  b.read(doc);
  c.validate();
  return c;
}

}  // namespace swmg::config
