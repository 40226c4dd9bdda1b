#pragma once

// Magnetostatic spin waves in an in-plane magnetized film: lowest thickness
// mode dispersion for the backward-volume (field along k) and surface
// (field across k) geometries, group velocity, damping and k(f) inversion.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "swmg/error.hpp"

namespace swmg::physics {

inline constexpr double kMu0 = 1.25663706212e-6;  // T·m/A
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct FilmParams {
  double Ms = 0.176 / kMu0;           // A/m
  double d = 5.4e-6;                  // m
  double gamma = kTwoPi * 28.0e9;     // rad/(s·T)
  double deltaH0 = 6.2e-5;            // µ0ΔH0, full linewidth (T)
  std::string label = "YIG-5.4um";

  double mu0Ms() const { return kMu0 * Ms; }

  void validate() const {
    detail::require(Ms >= 0.0, "film: Ms must be non-negative");
    detail::require(d > 0.0, "film: thickness must be positive");
    detail::require(gamma > 0.0, "film: gamma must be positive");
    detail::require(deltaH0 >= 0.0, "film: linewidth must be non-negative");
  }

  static FilmParams yig_5_4um() { return FilmParams{}; }
};

enum class Orientation {
  Parallel,       // backward volume waves
  Perpendicular,  // surface (Damon-Eshbach) waves
};

struct BiasField {
  double mu0H = 0.1429;  // T
  Orientation orientation = Orientation::Parallel;

  void validate() const {
    detail::require(mu0H > 0.0, "field: mu0H must be positive");
  }
};

class ModeContext {
 public:
  ModeContext() = default;
  ModeContext(FilmParams film, BiasField field)
      : film_(std::move(film)), field_(field) {
    film_.validate();
    field_.validate();
  }

  const FilmParams& film() const { return film_; }
  const BiasField& field() const { return field_; }
  Orientation orientation() const { return field_.orientation; }

  double omegaH() const { return film_.gamma * field_.mu0H; }
  double omegaM() const { return film_.gamma * film_.mu0Ms(); }

  ModeContext with_film(FilmParams film) const { return {std::move(film), field_}; }
  ModeContext with_field(BiasField field) const { return {film_, field}; }

 private:
  FilmParams film_{};
  BiasField field_{};
};

namespace detail {

// (1 - e^-x) / x, continuous at 0.
inline double thickness_factor(double x) {
  if (x < 1e-12) return 1.0 - 0.5 * x;
  return -std::expm1(-x) / x;
}

// d/dx of thickness_factor. The closed form cancels badly near 0, so a short
// Taylor series covers x < 1e-2.
inline double thickness_factor_slope(double x) {
  if (x < 1e-2) {
    const double x2 = x * x;
    return -0.5 + x / 3.0 - x2 / 8.0 + x2 * x / 30.0 - x2 * x2 / 144.0;
  }
  return (std::exp(-x) * (1.0 + x) - 1.0) / (x * x);
}

inline double angular(const ModeContext& ctx, double k) {
  const double wH = ctx.omegaH();
  const double wM = ctx.omegaM();
  const double x = k * ctx.film().d;
  if (ctx.orientation() == Orientation::Parallel) {
    return std::sqrt(wH * (wH + wM * thickness_factor(x)));
  }
  return std::sqrt(wH * (wH + wM) + 0.25 * wM * wM * -std::expm1(-2.0 * x));
}

}  // namespace detail

/// Uniform-precession frequency, the k -> 0 limit shared by both branches.
inline double fmr_frequency(const ModeContext& ctx) {
  const double wH = ctx.omegaH();
  return std::sqrt(wH * (wH + ctx.omegaM())) / kTwoPi;
}

/// Saturation magnetization (A/m) that places the FMR at `f_target` for the
/// context's field and gamma.
inline double calibrate_Ms(const ModeContext& ctx, double f_target) {
  const double wH = ctx.omegaH();
  const double w = kTwoPi * f_target;
  // Relative slack absorbs rounding when f_target is exactly the Larmor line.
  if (!(w >= wH * (1.0 - 1e-15))) {
    throw BandError("below-Larmor target: FMR target " + std::to_string(f_target) +
                    " Hz is below gamma*mu0H/2pi");
  }
  const double wM = std::max(0.0, w * w / wH - wH);
  return wM / ctx.film().gamma / kMu0;
}

/// Spin-wave frequency (Hz) at wavenumber k (rad/m).
inline double dispersion_f(const ModeContext& ctx, double k) {
  if (!(k >= 0.0)) throw BandError("dispersion_f: wavenumber must be non-negative");
  return detail::angular(ctx, k) / kTwoPi;
}

/// Group velocity dω/dk in m/s. Negative on the backward-volume branch.
/// At k = 0 the one-sided limits are returned:
///   BVMSW  -ωH·ωM·d / (4·ω0)
///   MSSW   +ωM²·d / (4·ω0)
inline double group_velocity(const ModeContext& ctx, double k) {
  if (!(k >= 0.0)) throw BandError("group_velocity: wavenumber must be non-negative");
  const double wH = ctx.omegaH();
  const double wM = ctx.omegaM();
  const double d = ctx.film().d;
  const double x = k * d;
  const double w = detail::angular(ctx, k);
  if (ctx.orientation() == Orientation::Parallel) {
    return wH * wM * d * detail::thickness_factor_slope(x) / (2.0 * w);
  }
  return wM * wM * d * std::exp(-2.0 * x) / (4.0 * w);
}

struct Band {
  double lower;  // Hz, exclusive
  double upper;  // Hz, exclusive
  bool contains(double f) const { return f > lower && f < upper; }
};

/// Open frequency interval carrying propagating waves for the context's
/// branch.
inline Band propagating_band(const ModeContext& ctx) {
  const double f0 = fmr_frequency(ctx);
  if (ctx.orientation() == Orientation::Parallel) {
    return {ctx.omegaH() / kTwoPi, f0};
  }
  return {f0, (ctx.omegaH() + 0.5 * ctx.omegaM()) / kTwoPi};
}

/// Wavenumber of the propagating mode at frequency f, by bisection on the
/// monotone dispersion branch. Converges to the last representable bracket.
inline double solve_k(const ModeContext& ctx, double f) {
  const Band band = propagating_band(ctx);
  if (!band.contains(f)) {
    throw BandError("no propagating mode at " + std::to_string(f) + " Hz");
  }
  const bool decreasing = ctx.orientation() == Orientation::Parallel;
  // true when k lies below the solution
  auto below = [&](double k) {
    const double fk = dispersion_f(ctx, k);
    return decreasing ? fk > f : fk < f;
  };

  double lo = 0.0;
  double hi = 1.0 / ctx.film().d;
  for (int i = 0; i < 2000 && below(hi); ++i) {
    lo = hi;
    hi *= 2.0;
  }
  if (below(hi)) throw BandError("no propagating mode at " + std::to_string(f) + " Hz");

  for (int i = 0; i < 4000; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (below(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Amplitude relaxation rate η = γ·µ0ΔH0/2 (rad/s). Free amplitude decays as
/// exp(-η t).
inline double damping_rate(const ModeContext& ctx) {
  return 0.5 * ctx.film().gamma * ctx.film().deltaH0;
}

/// Distance over which the amplitude of a wave at wavenumber k falls by 1/e.
inline double decay_length(const ModeContext& ctx, double k) {
  const double eta = damping_rate(ctx);
  if (eta == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(group_velocity(ctx, k)) / eta;
}

}  // namespace swmg::physics
