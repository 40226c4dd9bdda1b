#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <span>
#include <vector>

namespace swmg::fft {

namespace detail {

// The FFTW planner keeps global state; execution of an existing plan is
// thread safe, creation and destruction are not.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline void transform(std::span<std::complex<double>> data, int sign) {
  if (data.empty()) return;
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace detail

/// In-place forward DFT, X[k] = sum_n x[n] e^{-2πi kn/N}.
inline void forward(std::span<std::complex<double>> data) {
  detail::transform(data, FFTW_FORWARD);
}

/// In-place inverse DFT including the 1/N normalization.
inline void inverse(std::span<std::complex<double>> data) {
  detail::transform(data, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

/// Baseband frequency of DFT bin `j` for a length-n grid with spacing dt.
/// Bins at or above n/2 map to negative offsets.
inline double bin_offset(std::size_t j, std::size_t n, double dt) {
  const auto jj = static_cast<double>(j);
  const auto nn = static_cast<double>(n);
  return (j < (n + 1) / 2 ? jj : jj - nn) / (nn * dt);
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace swmg::fft
