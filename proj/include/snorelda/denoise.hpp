#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "snorelda/audio_io.hpp"

namespace snore {

/// Single-band magnitude spectral subtraction settings. Defaults: 32 ms Hann
/// frames with 50% hop at 16 kHz, over-subtraction 2, spectral floor 0.02,
/// noise estimated from the quietest 10% of frames.
struct DenoiseConfig {
  std::size_t fft_size = 512;
  std::size_t hop = 256;
  double alpha = 2.0;
  double floor_beta = 0.02;
  double noise_fraction = 0.1;

  void validate() const;
  bool operator==(const DenoiseConfig&) const = default;
};

struct NoiseProfile {
  std::vector<double> mean_magnitude;  // fft_size / 2 + 1 bins
  std::size_t fft_size = 0;
};

/// Mean Hann-windowed STFT magnitude over the lowest-energy frames.
NoiseProfile estimate_noise(const Recording& rec, const DenoiseConfig& config);

/// max(|X| - alpha * noise, beta * |X|) for one bin.
double subtracted_magnitude(double magnitude, double noise_magnitude,
                            const DenoiseConfig& config);

/// Output has the same length and rate as the input; phase is reused and
/// frames are recombined by weighted overlap-add.
Recording spectral_subtract(const Recording& rec, const NoiseProfile& noise,
                            const DenoiseConfig& config);

/// estimate_noise followed by spectral_subtract.
Recording denoise(const Recording& rec, const DenoiseConfig& config);

/// 10 log10(sum clean^2 / sum (test - clean)^2) over the common length.
double snr_db(std::span<const float> clean, std::span<const float> test);

}  // namespace snore
