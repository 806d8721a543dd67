#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "snorelda/audio_io.hpp"

namespace snore {

inline constexpr std::size_t kFeatureCount = 50;
inline constexpr std::size_t kMfccCount = 13;
inline constexpr std::size_t kChromaCount = 12;

/// Canonical positions inside a FeatureVector. Never reorder.
namespace feature_index {
inline constexpr std::size_t kEnergy = 0;
inline constexpr std::size_t kEnergyEntropy = 1;
inline constexpr std::size_t kZcr = 2;
inline constexpr std::size_t kFormant1 = 3;
inline constexpr std::size_t kMfcc1 = 6;
inline constexpr std::size_t kDeltaMfcc1 = 19;
inline constexpr std::size_t kChromaC = 32;
inline constexpr std::size_t kSpectralEntropy = 44;
inline constexpr std::size_t kSpectralFlux = 45;
inline constexpr std::size_t kSpectralCentroid = 46;
inline constexpr std::size_t kSpectralRolloff = 47;
inline constexpr std::size_t kF0 = 48;
inline constexpr std::size_t kHarmonic = 49;
}  // namespace feature_index

/// Human-readable names in canonical order ("energy", "mfcc_1", "chroma_A", ...).
const std::array<std::string, kFeatureCount>& feature_names();

struct FeatureConfig {
  int sample_rate = kSampleRate;

  // Short-time grid used for MFCC, spectral shape, formants and harmonics.
  std::size_t frame_len = 400;  // 25 ms
  std::size_t hop = 160;        // 10 ms
  std::size_t fft_size = 512;

  std::size_t energy_blocks = 10;

  std::size_t mel_filters = 26;
  double mel_low_hz = 0.0;
  double mel_high_hz = 8000.0;
  std::size_t delta_half_width = 2;
  double log_floor = 1e-10;

  // Chroma needs semitone resolution, which a 25 ms frame cannot provide.
  std::size_t chroma_frame_len = 4096;
  std::size_t chroma_hop = 2048;
  double chroma_min_hz = 32.7;

  double rolloff_fraction = 0.85;

  // Pitch frames are centred on each grid frame but long enough to hold two
  // periods at the lowest pitch.
  std::size_t pitch_frame_len = 800;
  double pitch_min_hz = 40.0;
  double pitch_max_hz = 500.0;
  double voicing_threshold = 0.3;
  int max_harmonic = 8;

  std::size_t lpc_order = 12;
  double formant_max_bandwidth_hz = 400.0;

  void validate() const;
  bool operator==(const FeatureConfig&) const = default;
};

struct FeatureVector {
  std::string patient_id;
  std::size_t window_index = 0;
  std::optional<SoundClass> label;
  std::array<double, kFeatureCount> values{};
};

/// Hann-windowed sub-frames covering one analysis window, with their power
/// spectra. Every frame lies fully inside the window.
struct SubframeGrid {
  std::size_t frame_len = 0;
  std::size_t hop = 0;
  std::size_t fft_size = 0;
  std::size_t count = 0;
  int sample_rate = kSampleRate;
  std::vector<double> source;  // unwindowed window samples
  std::vector<double> frames;  // count x frame_len
  std::vector<double> power;   // count x bins()

  std::size_t bins() const { return fft_size / 2 + 1; }
  double bin_hz() const { return static_cast<double>(sample_rate) / static_cast<double>(fft_size); }
  std::span<const double> frame(std::size_t i) const {
    return {frames.data() + i * frame_len, frame_len};
  }
  std::span<const double> power_spectrum(std::size_t i) const {
    return {power.data() + i * bins(), bins()};
  }
};

SubframeGrid make_subframe_grid(std::span<const double> samples, const FeatureConfig& config);

// --- time domain -----------------------------------------------------------

struct TimeFeatures {
  double energy = 0.0;
  double entropy = 0.0;
  double zcr = 0.0;
};

/// Mean square, natural-log entropy of sub-block energies, and the fraction
/// of adjacent sample pairs that change sign (zero counts as non-negative).
TimeFeatures time_features(std::span<const double> samples, std::size_t blocks = 10);

// --- cepstral --------------------------------------------------------------

using Cepstrum = std::array<double, kMfccCount>;

/// Triangular HTK-mel filters, each scaled to unit weight sum so that a flat
/// spectrum yields equal band energies.
class MelFilterbank {
 public:
  MelFilterbank(const FeatureConfig& config);

  std::size_t filters() const { return filters_; }
  std::size_t bins() const { return bins_; }
  double weight(std::size_t filter, std::size_t bin) const { return weights_[filter * bins_ + bin]; }
  void apply(std::span<const double> power, std::span<double> energies) const;

 private:
  std::size_t filters_;
  std::size_t bins_;
  std::vector<double> weights_;
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// c1..c13 of the orthonormal DCT-II of log mel energies (c0 dropped).
Cepstrum mfcc_from_power(std::span<const double> power, const MelFilterbank& bank,
                         double log_floor);
std::vector<Cepstrum> mfcc(const SubframeGrid& grid, const FeatureConfig& config);

/// Regression deltas with replicated edges. Throws InsufficientData when
/// fewer than 2 * half_width + 1 frames are supplied.
std::vector<Cepstrum> delta_mfcc(std::span<const Cepstrum> frames, std::size_t half_width = 2);

// --- chroma ----------------------------------------------------------------

using Chroma = std::array<double, kChromaCount>;

/// Pitch class (0 = C .. 11 = B) of a frequency, by nearest equal-tempered note.
int pitch_class(double hz);

Chroma chroma_from_power(std::span<const double> power, std::size_t fft_size, int sample_rate,
                         double min_hz);

/// One chroma vector per long frame (chroma_frame_len / chroma_hop) of the
/// grid's source window.
std::vector<Chroma> chroma(const SubframeGrid& grid, const FeatureConfig& config);

// --- spectral shape --------------------------------------------------------

struct SpectralShape {
  double entropy = 0.0;
  double flux = 0.0;
  double centroid = 0.0;
  double rolloff = 0.0;
};

double spectral_entropy(std::span<const double> power);
double spectral_centroid(std::span<const double> power, double bin_hz);
double spectral_rolloff(std::span<const double> power, double bin_hz, double fraction);
double spectral_flux(std::span<const double> previous_power, std::span<const double> power);

std::vector<SpectralShape> spectral_shape(const SubframeGrid& grid, const FeatureConfig& config);

// --- pitch and formants ----------------------------------------------------

struct PitchEstimate {
  double f0 = 0.0;    // 0 when unvoiced
  double peak = 0.0;  // normalized autocorrelation at the chosen lag
};

/// Normalized cross-correlation pitch over one frame. Only interior local
/// maxima in the lag range count; the shortest lag within 90% of the best
/// peak wins, which suppresses period-doubling errors.
PitchEstimate estimate_pitch(std::span<const double> frame, const FeatureConfig& config);

/// Strongest power bin among harmonics 2..max_harmonic of f0, +/- 1 bin.
double harmonic_frequency(std::span<const double> power, double bin_hz, double f0,
                          int max_harmonic);

/// Levinson-Durbin recursion. Returns the prediction polynomial
/// [1, a1, .., ap], or nothing if the autocorrelation is not positive definite.
std::optional<std::vector<double>> levinson_durbin(std::span<const double> autocorr,
                                                   std::size_t order);

/// First three resonances of an LPC polynomial with bandwidth below the
/// limit, ascending; missing formants are 0.
std::array<double, 3> formants_from_lpc(std::span<const double> lpc, int sample_rate,
                                        double max_bandwidth_hz);

struct PitchFormants {
  double f0 = 0.0;
  double harmonic = 0.0;
  std::array<double, 3> formants{};
  bool voiced = false;
  bool lpc_ok = true;
};

struct FeatureDiagnostics {
  std::size_t frames = 0;
  std::size_t voiced_frames = 0;
  std::size_t lpc_failures = 0;
};

std::vector<PitchFormants> pitch_and_formants(const SubframeGrid& grid,
                                              const FeatureConfig& config,
                                              FeatureDiagnostics* diagnostics = nullptr);

// --- extraction ------------------------------------------------------------

/// Per-frame intermediates retained for inspection.
struct FrameFeatures {
  std::vector<Cepstrum> mfcc;
  std::vector<Cepstrum> delta;
  std::vector<Chroma> chroma;
  std::vector<SpectralShape> shape;
  std::vector<PitchFormants> pitch;
};

struct FeatureExtraction {
  FeatureVector vector;
  TimeFeatures time;
  FrameFeatures frames;
  FeatureDiagnostics diagnostics;
};

/// Window-level features: time features over the whole window; every
/// short-time quantity is the arithmetic mean over its frames, except F0 and
/// harmonic frequency which average voiced frames only (0 if none).
FeatureExtraction extract_features_detailed(const AnalysisWindow& window,
                                            const FeatureConfig& config);

FeatureVector extract_features(const AnalysisWindow& window, const FeatureConfig& config);

}  // namespace snore
