#include <doctest.h>

#include <algorithm>

#include "snorelda/denoise.hpp"
#include "snorelda/error.hpp"
#include "support.hpp"

using namespace snore;

TEST_CASE("white noise gives a roughly flat noise profile") {
  const DenoiseConfig cfg;
  const auto p = estimate_noise(testing::recording(testing::white(160000, 0.1, 11)), cfg);
  REQUIRE(p.mean_magnitude.size() == 257);
  const auto [lo, hi] = std::minmax_element(p.mean_magnitude.begin(), p.mean_magnitude.end());
  CHECK(*lo > 0.0);
  CHECK(*hi / *lo < 3.0);
}

TEST_CASE("silence gives an all-zero profile") {
  const auto p = estimate_noise(testing::recording(std::vector<double>(160000, 0.0)), DenoiseConfig{});
  CHECK(std::all_of(p.mean_magnitude.begin(), p.mean_magnitude.end(), [](double m) { return m == 0.0; }));
}

TEST_CASE("sine then silence: profile comes from the silent half") {
  auto x = testing::sine(160000, 1000.0, 0.5);
  std::fill(x.begin() + 80000, x.end(), 0.0);
  const auto p = estimate_noise(testing::recording(x), DenoiseConfig{});
  CHECK(*std::max_element(p.mean_magnitude.begin(), p.mean_magnitude.end()) < 1e-9);
}

TEST_CASE("recordings shorter than one frame are rejected") {
  CHECK_THROWS_AS(estimate_noise(testing::recording(std::vector<double>(100, 0.1)), DenoiseConfig{}), Error);
}

TEST_CASE("zero noise profile reproduces the input") {
  const DenoiseConfig cfg;
  const auto rec = testing::recording(testing::white(50000, 0.2, 4));
  NoiseProfile zero{std::vector<double>(257, 0.0), 512};
  const auto out = spectral_subtract(rec, zero, cfg);
  REQUIRE(out.samples.size() == rec.samples.size());
  double dev = 0.0;
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    dev = std::max(dev, std::fabs(static_cast<double>(out.samples[i]) - rec.samples[i]));
  }
  CHECK(dev < 1e-6);
}

TEST_CASE("input equal to the estimated noise is pushed down to the floor") {
  // A waveform that repeats every hop makes every STFT frame identical, so
  // the estimate equals each frame's magnitude exactly.
  DenoiseConfig cfg;
  cfg.alpha = 1.0;
  const auto period = testing::white(256, 0.2, 8);
  std::vector<double> x(160000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = period[i % 256];
  const auto rec = testing::recording(x);
  const auto out = denoise(rec, cfg);
  const double e_in = testing::energy(rec.samples);
  const double e_out = testing::energy(out.samples);
  CHECK(e_out <= cfg.floor_beta * cfg.floor_beta * e_in + 0.01 * e_in);
}

TEST_CASE("1 kHz sine at 0 dB SNR in white noise gains at least 5 dB") {
  for (std::uint64_t seed : {1, 2, 3}) {
    // The tone is gated so that noise-only frames exist for the estimate.
    auto clean = testing::sine(160000, 1000.0, 1.0);
    for (std::size_t i = 0; i < clean.size(); ++i) {
      if ((i / 16000) % 5 == 4) clean[i] = 0.0;
    }
    double p = 0.0;
    for (double v : clean) p += v * v;
    p /= static_cast<double>(clean.size());
    const auto noise = testing::white(clean.size(), std::sqrt(p), seed);
    std::vector<double> mix(clean.size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 0.4 * (clean[i] + noise[i]);
    for (double& v : clean) v *= 0.4;

    const auto c = testing::recording(clean);
    const auto m = testing::recording(mix);
    const auto out = denoise(m, DenoiseConfig{});
    const double before = snr_db(c.samples, m.samples);
    const double after = snr_db(c.samples, out.samples);
    CHECK(std::fabs(before) < 0.2);
    CHECK(after - before >= 5.0);
  }
}

TEST_CASE("subtracted magnitude stays within [0, |X|]") {
  DenoiseConfig cfg;
  for (double mag : {0.0, 0.1, 1.0, 5.0}) {
    for (double noise : {0.0, 0.05, 1.0, 10.0}) {
      const double m = subtracted_magnitude(mag, noise, cfg);
      CHECK(m >= 0.0);
      CHECK(m <= mag);
    }
  }
}

TEST_CASE("output length matches and energy never increases") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto x = testing::white(40000 + 137 * seed, 0.1, seed);
    const auto s = testing::sine(x.size(), 300.0 + 100.0 * seed, 0.3);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += s[i];
    const auto rec = testing::recording(x);
    const auto out = denoise(rec, DenoiseConfig{});
    CHECK(out.samples.size() == rec.samples.size());
    CHECK(testing::energy(out.samples) <= testing::energy(rec.samples));
  }
}

TEST_CASE("denoising is deterministic") {
  const auto rec = testing::recording(testing::white(60000, 0.1, 21));
  CHECK(denoise(rec, DenoiseConfig{}).samples == denoise(rec, DenoiseConfig{}).samples);
}

TEST_CASE("invalid configurations are rejected") {
  DenoiseConfig cfg;
  cfg.fft_size = 500;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.floor_beta = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.noise_fraction = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
