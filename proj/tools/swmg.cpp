// swmg: runs one spin-wave majority gate experiment and writes CSV artifacts.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "swmg/commands.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::string> mode;
  std::optional<double> fc;
  std::optional<double> field;
  std::optional<double> scale;
  bool seedless = false;
};

swmg::config::RunConfig resolve(const Overrides& o) {
  auto cfg = o.config.empty() ? swmg::config::RunConfig{} : swmg::commands::load_config(o.config);
  if (o.out) cfg.out_dir = *o.out;
  if (o.mode) cfg.orientation = swmg::config::detail::parse_mode(*o.mode);
  if (o.fc) cfg.microwave.f_carrier = *o.fc;
  if (o.field) cfg.mu0H = *o.field;
  if (o.scale) cfg.geometry.scale = *o.scale;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-wave majority gate simulator"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "output directory");
  app.add_option("--mode", o.mode, "bvmsw | mssw")->check(CLI::IsMember({"bvmsw", "mssw"}));
  app.add_option("--fc", o.fc, "carrier frequency (Hz)");
  app.add_option("--field", o.field, "bias field mu0H (T)");
  app.add_option("--scale", o.scale, "geometry length scale");
  app.add_flag("--seedless", o.seedless, "pure mode (the core never draws random numbers)");
  for (const auto& name : swmg::commands::command_names()) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : swmg::commands::kConfigError;
  }

  try {
    const auto cfg = resolve(o);
    const auto outcome = swmg::commands::run(app.get_subcommands().front()->get_name(), cfg);
    std::cout << outcome.summary << '\n';
    return outcome.exit_code;
  } catch (const swmg::Error& e) {
    std::cerr << "swmg: " << e.what() << '\n';
    return swmg::commands::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "swmg: " << e.what() << '\n';
    return swmg::commands::kConfigError;
  }
}
