#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace snore {

/// Real-input FFT of a fixed size backed by FFTW. Each instance owns its plan
/// and buffers, so instances are not shared between threads; construct one per
/// worker. Planning uses FFTW_ESTIMATE so results are reproducible run to run.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return size_; }
  std::size_t bins() const { return size_ / 2 + 1; }

  /// Forward transform; `input` shorter than size() is zero-padded.
  void forward(std::span<const double> input, std::span<std::complex<double>> out);

  /// |X_k|^2 for k = 0 .. size()/2.
  void power(std::span<const double> input, std::span<double> out);

  /// Inverse transform including the 1/N scale.
  void inverse(std::span<const std::complex<double>> input, std::span<double> out);

 private:
  std::size_t size_;
  double* real_ = nullptr;
  void* spectrum_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace snore
