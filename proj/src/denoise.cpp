#include "snorelda/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "snorelda/error.hpp"
#include "snorelda/fft.hpp"

namespace snore {
namespace {

std::vector<double> periodic_hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

void DenoiseConfig::validate() const {
  if (!is_power_of_two(fft_size) || fft_size < 16) {
    throw Error(ErrorKind::Validation, "denoise fft_size must be a power of two >= 16");
  }
  if (hop == 0 || hop > fft_size) {
    throw Error(ErrorKind::Validation, "denoise hop must be in (0, fft_size]");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::Validation, "denoise alpha must be finite and >= 0");
  }
  if (!(floor_beta >= 0.0 && floor_beta <= 1.0)) {
    throw Error(ErrorKind::Validation, "denoise floor_beta must be in [0, 1]");
  }
  if (!(noise_fraction > 0.0 && noise_fraction <= 1.0)) {
    throw Error(ErrorKind::Validation, "denoise noise_fraction must be in (0, 1]");
  }
}

NoiseProfile estimate_noise(const Recording& rec, const DenoiseConfig& config) {
  config.validate();
  const std::size_t n = rec.samples.size();
  const std::size_t frame = config.fft_size;
  if (n < frame) {
    throw Error(ErrorKind::InsufficientData,
                "recording shorter than one STFT frame (" + std::to_string(frame) +
                    " samples)");
  }
  const std::size_t frames = (n - frame) / config.hop + 1;

  std::vector<double> energy(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    const float* x = rec.samples.data() + t * config.hop;
    double e = 0.0;
    for (std::size_t i = 0; i < frame; ++i) e += static_cast<double>(x[i]) * x[i];
    energy[t] = e;
  }
  std::vector<std::size_t> order(frames);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return energy[a] < energy[b]; });
  const auto quiet = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(config.noise_fraction * static_cast<double>(frames))));

  RealFft fft(frame);
  const auto window = periodic_hann(frame);
  std::vector<double> buf(frame);
  std::vector<std::complex<double>> spec(fft.bins());
  NoiseProfile profile;
  profile.fft_size = frame;
  profile.mean_magnitude.assign(fft.bins(), 0.0);
  for (std::size_t q = 0; q < quiet; ++q) {
    const float* x = rec.samples.data() + order[q] * config.hop;
    for (std::size_t i = 0; i < frame; ++i) buf[i] = window[i] * x[i];
    fft.forward(buf, spec);
    for (std::size_t k = 0; k < spec.size(); ++k) profile.mean_magnitude[k] += std::abs(spec[k]);
  }
  for (double& m : profile.mean_magnitude) m /= static_cast<double>(quiet);
  return profile;
}

double subtracted_magnitude(double magnitude, double noise_magnitude,
                            const DenoiseConfig& config) {
  return std::max(magnitude - config.alpha * noise_magnitude, config.floor_beta * magnitude);
}

Recording spectral_subtract(const Recording& rec, const NoiseProfile& noise,
                            const DenoiseConfig& config) {
  config.validate();
  if (noise.fft_size != config.fft_size ||
      noise.mean_magnitude.size() != config.fft_size / 2 + 1) {
    throw Error(ErrorKind::Validation, "noise profile does not match denoise fft_size");
  }
  const std::size_t n = rec.samples.size();
  const std::size_t frame = config.fft_size;
  const std::size_t hop = config.hop;

  // Pad so every input sample is covered by the same number of frames.
  const std::size_t lead = frame - hop;
  std::size_t padded = lead + n + lead;
  if (padded < frame) padded = frame;
  const std::size_t frames = (padded - frame + hop - 1) / hop + 1;
  padded = (frames - 1) * hop + frame;

  std::vector<double> input(padded, 0.0);
  for (std::size_t i = 0; i < n; ++i) input[lead + i] = rec.samples[i];

  RealFft fft(frame);
  const auto window = periodic_hann(frame);
  std::vector<double> acc(padded, 0.0);
  std::vector<double> weight(padded, 0.0);
  std::vector<double> buf(frame);
  std::vector<std::complex<double>> spec(fft.bins());

  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t offset = t * hop;
    for (std::size_t i = 0; i < frame; ++i) buf[i] = window[i] * input[offset + i];
    fft.forward(buf, spec);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const double mag = std::abs(spec[k]);
      if (mag > 0.0) {
        spec[k] *= subtracted_magnitude(mag, noise.mean_magnitude[k], config) / mag;
      }
    }
    fft.inverse(spec, buf);
    for (std::size_t i = 0; i < frame; ++i) {
      acc[offset + i] += buf[i];
      weight[offset + i] += window[i];
    }
  }

  Recording out;
  out.patient_id = rec.patient_id;
  out.sample_rate_hz = rec.sample_rate_hz;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weight[lead + i];
    const double v = w > 1e-12 ? acc[lead + i] / w : 0.0;
    out.samples[i] = static_cast<float>(std::clamp(v, -1.0, 1.0));
  }
  return out;
}

Recording denoise(const Recording& rec, const DenoiseConfig& config) {
  return spectral_subtract(rec, estimate_noise(rec, config), config);
}

double snr_db(std::span<const float> clean, std::span<const float> test) {
  const std::size_t n = std::min(clean.size(), test.size());
  double signal = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = clean[i];
    const double d = static_cast<double>(test[i]) - c;
    signal += c * c;
    error += d * d;
  }
  if (error == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal / error);
}

}  // namespace snore
