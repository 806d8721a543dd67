#include <cmath>
#include <numeric>

#include "snorelda/audio_io.hpp"
#include "snorelda/error.hpp"

namespace snore {
namespace {

constexpr double kZeroCrossings = 16.0;
constexpr double kKaiserBeta = 8.0;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  double px = M_PI * x;
  return std::sin(px) / px;
}

double kaiser(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - u * u)) /
         std::cyl_bessel_i(0.0, kKaiserBeta);
}

}  // namespace

std::vector<float> resample(std::span<const float> input, int from_hz, int to_hz) {
  if (from_hz <= 0 || to_hz <= 0) {
    throw Error(ErrorKind::Validation, "sample rates must be positive");
  }
  if (from_hz == to_hz) return {input.begin(), input.end()};

  const long g = std::gcd(from_hz, to_hz);
  const long up = to_hz / g;
  const long down = from_hz / g;
  // Cutoff relative to the input Nyquist; lowered when decimating.
  const double cutoff = std::min(1.0, static_cast<double>(up) / down);
  const double half_width = kZeroCrossings / cutoff;
  const long reach = static_cast<long>(std::ceil(half_width));
  const long taps = 2 * reach + 1;

  // table[p][k]: weight for input sample base + (k - reach) at phase p / up.
  std::vector<double> table(static_cast<std::size_t>(up * taps));
  for (long p = 0; p < up; ++p) {
    double frac = static_cast<double>(p) / up;
    double sum = 0.0;
    for (long k = 0; k < taps; ++k) {
      double tau = frac - static_cast<double>(k - reach);
      double w = cutoff * sinc(cutoff * tau) * kaiser(tau / half_width);
      table[p * taps + k] = w;
      sum += w;
    }
    for (long k = 0; k < taps; ++k) table[p * taps + k] /= sum;
  }

  const std::size_t n_in = input.size();
  const std::size_t n_out =
      static_cast<std::size_t>(static_cast<unsigned long long>(n_in) * up / down);
  std::vector<float> out(n_out);
  for (std::size_t j = 0; j < n_out; ++j) {
    unsigned long long num = static_cast<unsigned long long>(j) * down;
    long base = static_cast<long>(num / up);
    long phase = static_cast<long>(num % up);
    const double* w = &table[phase * taps];
    double acc = 0.0;
    for (long k = 0; k < taps; ++k) {
      long i = base + k - reach;
      if (i < 0 || i >= static_cast<long>(n_in)) continue;
      acc += w[k] * input[static_cast<std::size_t>(i)];
    }
    out[j] = static_cast<float>(acc);
  }
  return out;
}

}  // namespace snore
