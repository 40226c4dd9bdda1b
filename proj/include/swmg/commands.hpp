#pragma once

// Subcommand implementations behind the `swmg` executable. Each command
// writes its CSV artifact(s) into cfg.out_dir and returns a one-line summary
// record plus the process exit code.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "swmg/circuit.hpp"
#include "swmg/config.hpp"
#include "swmg/error.hpp"
#include "swmg/experiment.hpp"
#include "swmg/kv.hpp"
#include "swmg/logic.hpp"
#include "swmg/physics.hpp"
#include "swmg/signal.hpp"

namespace swmg::commands {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kPhysicsError = 3,
  kIndeterminate = 4,
};

struct Outcome {
  int exit_code = kOk;
  std::string summary;
};

namespace detail {

inline std::ofstream open_artifact(const config::RunConfig& cfg, const std::string& file) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = std::filesystem::path(cfg.out_dir) / file;
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

inline std::string g(double v) { return fmt::format("{:.6g}", v); }
inline std::string e(double v) { return fmt::format("{:.9e}", v); }

inline circuit::GateNetlist prepared(const config::RunConfig& cfg, bool with_switch = false) {
  auto n = cfg.netlist(with_switch);
  return cfg.auto_calibrate ? experiment::calibrate(n).netlist : n;
}

}  // namespace detail

/// Geometry scale of the switching baseline relative to the configured
/// lengths at scale 1: taken from switch.l_eff_m when set, otherwise fitted
/// so the rise time equals switch.target_rise_s.
struct Baseline {
  double scale;
  double l_eff;  // m
  bool fitted;
};

inline Baseline switching_baseline(const config::RunConfig& cfg) {
  auto unit = cfg;
  unit.geometry.scale = 1.0;
  const auto n = unit.netlist(true);
  if (cfg.switch_l_eff > 0.0) {
    const double path = n.geometry.i2_path_length();
    if (!(path > 0.0)) throw ConfigError("switch.l_eff_m needs a non-zero i2 path length");
    return {cfg.switch_l_eff / path, cfg.switch_l_eff, false};
  }
  const auto fit = experiment::fit_effective_length(n, cfg.switch_target_rise, cfg.encoding,
                                                    cfg.switch_timing());
  return {fit.scale, fit.L_eff, true};
}

inline Outcome cmd_dispersion(const config::RunConfig& cfg) {
  const auto ctx = cfg.mode_context();
  auto os = detail::open_artifact(cfg, "dispersion.csv");
  os << "k_rad_per_m,f_Hz,v_g_m_per_s\n";
  auto row = [&](double k) {
    os << fmt::format("{},{},{}\n", detail::e(k), detail::e(physics::dispersion_f(ctx, k)),
                      detail::e(physics::group_velocity(ctx, k)));
  };
  row(0.0);
  const double step = std::log(cfg.k_max / cfg.k_min) / (cfg.k_points - 1);
  for (int i = 0; i < cfg.k_points; ++i) row(cfg.k_min * std::exp(step * i));
  const auto band = physics::propagating_band(ctx);
  return {kOk, fmt::format("dispersion mode={} mu0Ms_T={} f_fmr_Hz={} band_lo_Hz={} band_hi_Hz={} rows={}",
                           config::detail::mode_name(cfg.orientation), detail::g(ctx.film().mu0Ms()),
                           detail::g(physics::fmr_frequency(ctx)), detail::g(band.lower),
                           detail::g(band.upper), cfg.k_points + 1)};
}

inline Outcome cmd_transmission(const config::RunConfig& cfg) {
  const auto n = cfg.netlist();
  std::vector<double> grid(static_cast<std::size_t>(cfg.f_points));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    grid[j] = cfg.f_min + (cfg.f_max - cfg.f_min) * static_cast<double>(j) /
                              static_cast<double>(grid.size() - 1);
  }
  std::string peaks;
  for (auto ch : circuit::kChannels) {
    const auto points = circuit::transmission_spectrum(n, ch, grid, cfg.floor_dB);
    auto os = detail::open_artifact(cfg, "transmission_" + circuit::name(ch) + ".csv");
    os << "f_Hz,s21_dB\n";
    double best = cfg.floor_dB;
    double best_f = 0.0;
    for (const auto& p : points) {
      os << fmt::format("{},{}\n", detail::e(p.f), detail::e(p.dB));
      if (p.dB > best) best = p.dB, best_f = p.f;
    }
    peaks += fmt::format(" peak_{}_dB={} peak_{}_Hz={}", circuit::name(ch), detail::g(best),
                         circuit::name(ch), detail::g(best_f));
  }
  return {kOk, fmt::format("transmission f_fmr_Hz={}{}",
                           detail::g(physics::fmr_frequency(n.physics)), peaks)};
}

inline Outcome cmd_truthtable(const config::RunConfig& cfg) {
  const auto n = detail::prepared(cfg);
  const auto table = logic::truth_table(n, cfg.encoding);
  auto os = detail::open_artifact(cfg, "truthtable.csv");
  os << "in_phase_i1_rad,in_phase_i2_rad,in_phase_i3_rad,state,out_phase_rad,out_amp,decoded\n";
  for (const auto& r : table.rows) {
    os << fmt::format("{:.6f},{:.6f},{:.6f},{},{:.9f},{},{}\n", r.in_phases[0], r.in_phases[1],
                      r.in_phases[2], r.state.str(), r.readout.phase, detail::e(r.readout.amplitude),
                      logic::to_string(r.readout.decoded));
  }
  const int code = table.any_indeterminate ? kIndeterminate : kOk;
  return {code, fmt::format("truthtable decoded_ok={} indeterminate={} min_margin_rad={} "
                            "amplitude_ratio={} miscalibrated={}",
                            table.all_correct, table.any_indeterminate, detail::g(table.min_margin),
                            detail::g(table.amplitude_ratio), table.miscalibrated)};
}

inline Outcome cmd_calibrate(const config::RunConfig& cfg) {
  const auto cal = experiment::calibrate(cfg.netlist());
  auto tuned = cfg;
  tuned.microwave.attenuation_dB = cal.result.attenuator_dB;
  tuned.microwave.phase_trim_rad = cal.netlist.phase_trim;
  auto os = detail::open_artifact(cfg, "calibration.cfg");
  os << "# calibrated settings; usable as --config for every command\n";
  tuned.to_document().write(os);
  const auto& r = cal.result;
  return {kOk, fmt::format("calibrate attenuation_dB={},{},{} phase_offsets_rad={},{},{} "
                           "imbalance={} phase_error_rad={}",
                           detail::g(r.attenuator_dB[0]), detail::g(r.attenuator_dB[1]),
                           detail::g(r.attenuator_dB[2]), detail::g(r.phase_offsets_rad[0]),
                           detail::g(r.phase_offsets_rad[1]), detail::g(r.phase_offsets_rad[2]),
                           detail::g(r.residual_amplitude_imbalance),
                           detail::g(r.residual_phase_error))};
}

inline Outcome cmd_switch(const config::RunConfig& cfg) {
  const auto base = switching_baseline(cfg);
  const double scale = base.scale * cfg.geometry.scale;
  auto unit = cfg;
  unit.geometry.scale = 1.0;
  auto n = unit.netlist(true).with_scale(scale);
  if (cfg.auto_calibrate) n = experiment::calibrate(n).netlist;
  const auto res =
      experiment::run_switching(n, cfg.encoding, cfg.switch_ref_phase, cfg.switch_timing());
  auto os = detail::open_artifact(cfg, "switch_trace.csv");
  signal::write_csv(os, res.trace);
  return {kOk, fmt::format("switch t_rise_s={} f_clock_Hz={} v_low={} v_max={} l_eff_m={} "
                           "l_eff_fitted={} scale={} i2_path_m={}",
                           detail::g(res.t_rise), detail::g(res.f_clock), detail::g(res.v_low),
                           detail::g(res.v_max), detail::g(base.l_eff), base.fitted,
                           detail::g(cfg.geometry.scale), detail::g(n.geometry.i2_path_length()))};
}

inline Outcome cmd_scale(const config::RunConfig& cfg) {
  const auto base = switching_baseline(cfg);
  auto unit = cfg;
  unit.geometry.scale = 1.0;
  const auto baseline = unit.netlist(true).with_scale(base.scale);
  const auto study =
      experiment::scaling_study(baseline, cfg.scale_factors, cfg.encoding, cfg.switch_timing());
  auto os = detail::open_artifact(cfg, "scale.csv");
  os << "scale,t_rise_s,f_clock_Hz,t_rise_minus_floor_s,ok\n";
  for (const auto& r : study.rows) {
    os << fmt::format("{},{},{},{},{}\n", detail::e(r.scale), detail::e(r.t_rise),
                      detail::e(r.f_clock), detail::e(r.ok ? r.t_rise - study.floor_t_rise : 0.0),
                      r.ok ? "ok" : "flagged: " + r.error);
  }
  return {kOk, fmt::format("scale l_eff_m={} floor_s={} slope_s={} r_squared={} rows={}",
                           detail::g(base.l_eff), detail::g(study.floor_t_rise),
                           detail::g(study.slope), detail::g(study.r_squared), study.rows.size())};
}

inline Outcome cmd_fulladder(const config::RunConfig& cfg) {
  const auto n = detail::prepared(cfg);
  auto os = detail::open_artifact(cfg, "fulladder.csv");
  os << "a,b,cin,sum,cout,expected_sum,expected_cout,match,amp_spread,cascadable\n";
  std::vector<logic::GateReadout> all;
  bool all_match = true;
  for (int bits = 0; bits < 8; ++bits) {
    const bool a = bits & 4, b = bits & 2, cin = bits & 1;
    const auto row = logic::full_adder_on_gate(n, a, b, cin, cfg.encoding);
    all.insert(all.end(), row.readouts.begin(), row.readouts.end());
    all_match = all_match && row.match;
    os << fmt::format("{:d},{:d},{:d},{:d},{:d},{:d},{:d},{},{:.6f},{}\n", a, b, cin, row.gate.sum,
                      row.gate.cout, row.expected.sum, row.expected.cout, row.match,
                      row.amplitude_spread, row.amplitude_spread <= cfg.cascade_tolerance);
  }
  const auto cascade = logic::cascade_check(all, cfg.cascade_tolerance);
  return {all_match ? kOk : kIndeterminate,
          fmt::format("fulladder all_match={} amplitude_spread={} cascadable={} tolerance={}",
                      all_match, detail::g(cascade.spread), cascade.cascadable,
                      detail::g(cfg.cascade_tolerance))};
}

inline config::RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  return config::RunConfig::from_document(kv::Document::parse(in));
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"dispersion", "transmission", "truthtable", "switch",
                                              "calibrate",  "fulladder",    "scale"};
  return names;
}

inline Outcome run(const std::string& command, const config::RunConfig& cfg) {
  if (command == "dispersion") return cmd_dispersion(cfg);
  if (command == "transmission") return cmd_transmission(cfg);
  if (command == "truthtable") return cmd_truthtable(cfg);
  if (command == "switch") return cmd_switch(cfg);
  if (command == "calibrate") return cmd_calibrate(cfg);
  if (command == "fulladder") return cmd_fulladder(cfg);
  if (command == "scale") return cmd_scale(cfg);
  throw ConfigError("unknown command '" + command + "'");
}

/// Exit code for an exception escaping a command.
inline int exit_code_for(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kConfigError;
  if (dynamic_cast<const IndeterminateError*>(&e)) return kIndeterminate;
  return kPhysicsError;
}

}  // namespace swmg::commands
