#include "snorelda/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "snorelda/error.hpp"

namespace snore {
namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RealFft::RealFft(std::size_t size) : size_(size) {
  if (size < 2) throw Error(ErrorKind::Validation, "FFT size must be at least 2");
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(size_);
  auto* spec = fftw_alloc_complex(bins());
  spectrum_ = spec;
  forward_plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(size_), real_, spec, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(size_), spec, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(real_);
  fftw_free(spectrum_);
}

void RealFft::forward(std::span<const double> input, std::span<std::complex<double>> out) {
  const std::size_t n = std::min(input.size(), size_);
  std::copy_n(input.begin(), n, real_);
  std::fill(real_ + n, real_ + size_, 0.0);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  const auto* spec = static_cast<const fftw_complex*>(spectrum_);
  const std::size_t m = std::min(out.size(), bins());
  for (std::size_t k = 0; k < m; ++k) out[k] = {spec[k][0], spec[k][1]};
}

void RealFft::power(std::span<const double> input, std::span<double> out) {
  const std::size_t n = std::min(input.size(), size_);
  std::copy_n(input.begin(), n, real_);
  std::fill(real_ + n, real_ + size_, 0.0);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  const auto* spec = static_cast<const fftw_complex*>(spectrum_);
  const std::size_t m = std::min(out.size(), bins());
  for (std::size_t k = 0; k < m; ++k) {
    out[k] = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
  }
}

void RealFft::inverse(std::span<const std::complex<double>> input, std::span<double> out) {
  auto* spec = static_cast<fftw_complex*>(spectrum_);
  for (std::size_t k = 0; k < bins(); ++k) {
    std::complex<double> v = k < input.size() ? input[k] : std::complex<double>{};
    spec[k][0] = v.real();
    spec[k][1] = v.imag();
  }
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  const double scale = 1.0 / static_cast<double>(size_);
  const std::size_t m = std::min(out.size(), size_);
  for (std::size_t i = 0; i < m; ++i) out[i] = real_[i] * scale;
}

}  // namespace snore
