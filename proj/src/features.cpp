#include "snorelda/features.hpp"

#include <Eigen/Eigenvalues>
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

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

template <typename T>
T mean_of(const std::vector<T>& frames) {
  T acc{};
  if (frames.empty()) return acc;
  for (const auto& f : frames) {
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += f[k];
  }
  for (auto& v : acc) v /= static_cast<double>(frames.size());
  return acc;
}

}  // namespace

const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names = [] {
    std::array<std::string, kFeatureCount> n;
    n[feature_index::kEnergy] = "energy";
    n[feature_index::kEnergyEntropy] = "energy_entropy";
    n[feature_index::kZcr] = "zcr";
    for (int i = 0; i < 3; ++i) n[feature_index::kFormant1 + i] = "formant_" + std::to_string(i + 1);
    for (std::size_t i = 0; i < kMfccCount; ++i) {
      n[feature_index::kMfcc1 + i] = "mfcc_" + std::to_string(i + 1);
      n[feature_index::kDeltaMfcc1 + i] = "delta_mfcc_" + std::to_string(i + 1);
    }
    static const char* kPitchNames[] = {"C", "C#", "D", "D#", "E", "F",
                                        "F#", "G", "G#", "A", "A#", "B"};
    for (std::size_t i = 0; i < kChromaCount; ++i) {
      n[feature_index::kChromaC + i] = std::string("chroma_") + kPitchNames[i];
    }
    n[feature_index::kSpectralEntropy] = "spectral_entropy";
    n[feature_index::kSpectralFlux] = "spectral_flux";
    n[feature_index::kSpectralCentroid] = "spectral_centroid_hz";
    n[feature_index::kSpectralRolloff] = "spectral_rolloff_hz";
    n[feature_index::kF0] = "f0_hz";
    n[feature_index::kHarmonic] = "harmonic_hz";
    return n;
  }();
  return names;
}

void FeatureConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::Validation, "feature config: " + what); };
  if (sample_rate <= 0) bad("sample_rate must be positive");
  if (frame_len < 16 || hop == 0) bad("frame_len >= 16 and hop > 0 required");
  if (!is_power_of_two(fft_size) || fft_size < frame_len) bad("fft_size must be a power of two >= frame_len");
  if (energy_blocks == 0) bad("energy_blocks must be positive");
  if (mel_filters < 2 || !(mel_high_hz > mel_low_hz) || mel_low_hz < 0.0 ||
      mel_high_hz > sample_rate / 2.0) {
    bad("mel filterbank range invalid");
  }
  if (mel_filters <= kMfccCount) bad("need more mel filters than cepstral coefficients");
  if (delta_half_width == 0) bad("delta_half_width must be positive");
  if (!(log_floor > 0.0)) bad("log_floor must be positive");
  if (!is_power_of_two(chroma_frame_len) || chroma_hop == 0) bad("chroma_frame_len must be a power of two");
  if (!(rolloff_fraction > 0.0 && rolloff_fraction <= 1.0)) bad("rolloff_fraction must be in (0, 1]");
  if (!(pitch_min_hz > 0.0 && pitch_max_hz > pitch_min_hz)) bad("pitch range invalid");
  if (pitch_frame_len < frame_len) bad("pitch_frame_len must be >= frame_len");
  if (max_harmonic < 2) bad("max_harmonic must be >= 2");
  if (lpc_order < 2) bad("lpc_order must be >= 2");
  if (!(formant_max_bandwidth_hz > 0.0)) bad("formant_max_bandwidth_hz must be positive");
}

SubframeGrid make_subframe_grid(std::span<const double> samples, const FeatureConfig& config) {
  if (samples.size() < config.frame_len) {
    throw Error(ErrorKind::InsufficientData, "window shorter than one sub-frame");
  }
  SubframeGrid grid;
  grid.frame_len = config.frame_len;
  grid.hop = config.hop;
  grid.fft_size = config.fft_size;
  grid.sample_rate = config.sample_rate;
  grid.count = (samples.size() - config.frame_len) / config.hop + 1;
  grid.source.assign(samples.begin(), samples.end());
  grid.frames.resize(grid.count * grid.frame_len);
  grid.power.resize(grid.count * grid.bins());

  const auto window = periodic_hann(grid.frame_len);
  RealFft fft(grid.fft_size);
  for (std::size_t t = 0; t < grid.count; ++t) {
    double* out = grid.frames.data() + t * grid.frame_len;
    const double* in = samples.data() + t * grid.hop;
    for (std::size_t i = 0; i < grid.frame_len; ++i) out[i] = window[i] * in[i];
    fft.power({out, grid.frame_len}, {grid.power.data() + t * grid.bins(), grid.bins()});
  }
  return grid;
}

// --- time domain -----------------------------------------------------------

TimeFeatures time_features(std::span<const double> samples, std::size_t blocks) {
  TimeFeatures tf;
  const std::size_t n = samples.size();
  if (n == 0) return tf;

  double total = 0.0;
  for (double x : samples) total += x * x;
  tf.energy = total / static_cast<double>(n);

  if (blocks > 0 && total > 0.0) {
    std::vector<double> block_energy(blocks, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      block_energy[i * blocks / n] += samples[i] * samples[i];
    }
    double sum = std::accumulate(block_energy.begin(), block_energy.end(), 0.0);
    for (double e : block_energy) {
      if (e <= 0.0) continue;
      double p = e / sum;
      tf.entropy -= p * std::log(p);
    }
  }

  if (n > 1) {
    std::size_t changes = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if ((samples[i - 1] >= 0.0) != (samples[i] >= 0.0)) ++changes;
    }
    tf.zcr = static_cast<double>(changes) / static_cast<double>(n - 1);
  }
  return tf;
}

// --- cepstral --------------------------------------------------------------

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank::MelFilterbank(const FeatureConfig& config)
    : filters_(config.mel_filters), bins_(config.fft_size / 2 + 1), weights_(filters_ * bins_, 0.0) {
  const double mel_lo = hz_to_mel(config.mel_low_hz);
  const double mel_hi = hz_to_mel(config.mel_high_hz);
  std::vector<double> edges(filters_ + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(filters_ + 1));
  }
  const double bin_hz = static_cast<double>(config.sample_rate) / static_cast<double>(config.fft_size);
  for (std::size_t m = 0; m < filters_; ++m) {
    const double left = edges[m];
    const double centre = edges[m + 1];
    const double right = edges[m + 2];
    double sum = 0.0;
    for (std::size_t k = 0; k < bins_; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      double w = 0.0;
      if (f > left && f <= centre) {
        w = (f - left) / (centre - left);
      } else if (f > centre && f < right) {
        w = (right - f) / (right - centre);
      }
      weights_[m * bins_ + k] = w;
      sum += w;
    }
    if (sum <= 0.0) {
      throw Error(ErrorKind::Validation, "mel filter " + std::to_string(m) + " covers no FFT bin");
    }
    for (std::size_t k = 0; k < bins_; ++k) weights_[m * bins_ + k] /= sum;
  }
}

void MelFilterbank::apply(std::span<const double> power, std::span<double> energies) const {
  for (std::size_t m = 0; m < filters_; ++m) {
    const double* w = weights_.data() + m * bins_;
    double e = 0.0;
    for (std::size_t k = 0; k < bins_; ++k) e += w[k] * power[k];
    energies[m] = e;
  }
}

Cepstrum mfcc_from_power(std::span<const double> power, const MelFilterbank& bank, double log_floor) {
  const std::size_t m_count = bank.filters();
  std::vector<double> log_energy(m_count);
  bank.apply(power, log_energy);
  for (double& e : log_energy) e = std::log(std::max(e, log_floor));

  Cepstrum c{};
  const double scale = std::sqrt(2.0 / static_cast<double>(m_count));
  for (std::size_t k = 1; k <= kMfccCount; ++k) {
    double acc = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
      acc += log_energy[m] *
             std::cos(M_PI * static_cast<double>(k) * (static_cast<double>(m) + 0.5) /
                      static_cast<double>(m_count));
    }
    c[k - 1] = scale * acc;
  }
  return c;
}

std::vector<Cepstrum> mfcc(const SubframeGrid& grid, const FeatureConfig& config) {
  MelFilterbank bank(config);
  std::vector<Cepstrum> out(grid.count);
  for (std::size_t t = 0; t < grid.count; ++t) {
    out[t] = mfcc_from_power(grid.power_spectrum(t), bank, config.log_floor);
  }
  return out;
}

std::vector<Cepstrum> delta_mfcc(std::span<const Cepstrum> frames, std::size_t half_width) {
  const std::size_t n = frames.size();
  if (n < 2 * half_width + 1) {
    throw Error(ErrorKind::InsufficientData,
                "delta needs at least " + std::to_string(2 * half_width + 1) + " frames");
  }
  double denom = 0.0;
  for (std::size_t d = 1; d <= half_width; ++d) denom += static_cast<double>(d * d);
  denom *= 2.0;

  const auto at = [&](long t) -> const Cepstrum& {
    return frames[static_cast<std::size_t>(std::clamp<long>(t, 0, static_cast<long>(n) - 1))];
  };
  std::vector<Cepstrum> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < kMfccCount; ++k) {
      double acc = 0.0;
      for (std::size_t d = 1; d <= half_width; ++d) {
        const long ti = static_cast<long>(t);
        const long di = static_cast<long>(d);
        acc += static_cast<double>(d) * (at(ti + di)[k] - at(ti - di)[k]);
      }
      out[t][k] = acc / denom;
    }
  }
  return out;
}

// --- chroma ----------------------------------------------------------------

int pitch_class(double hz) {
  const long note = std::lround(12.0 * std::log2(hz / 440.0)) + 69;
  return static_cast<int>(((note % 12) + 12) % 12);
}

Chroma chroma_from_power(std::span<const double> power, std::size_t fft_size, int sample_rate,
                         double min_hz) {
  Chroma c{};
  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(fft_size);
  double total = 0.0;
  for (std::size_t k = 1; k < power.size(); ++k) {
    const double f = static_cast<double>(k) * bin_hz;
    if (f < min_hz) continue;
    c[static_cast<std::size_t>(pitch_class(f))] += power[k];
    total += power[k];
  }
  if (total > 0.0) {
    for (double& v : c) v /= total;
  } else {
    c.fill(0.0);
  }
  return c;
}

std::vector<Chroma> chroma(const SubframeGrid& grid, const FeatureConfig& config) {
  const std::size_t len = config.chroma_frame_len;
  const std::size_t n = grid.source.size();
  if (n < len) throw Error(ErrorKind::InsufficientData, "window shorter than a chroma frame");
  const std::size_t count = (n - len) / config.chroma_hop + 1;
  const auto window = periodic_hann(len);
  RealFft fft(len);
  std::vector<double> buf(len);
  std::vector<double> power(fft.bins());
  std::vector<Chroma> out(count);
  for (std::size_t t = 0; t < count; ++t) {
    const double* x = grid.source.data() + t * config.chroma_hop;
    for (std::size_t i = 0; i < len; ++i) buf[i] = window[i] * x[i];
    fft.power(buf, power);
    out[t] = chroma_from_power(power, len, grid.sample_rate, config.chroma_min_hz);
  }
  return out;
}

// --- spectral shape --------------------------------------------------------

double spectral_entropy(std::span<const double> power) {
  if (power.size() < 2) return 0.0;
  const double total = std::accumulate(power.begin(), power.end(), 0.0);
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double p : power) {
    if (p <= 0.0) continue;
    const double q = p / total;
    h -= q * std::log(q);
  }
  return h / std::log(static_cast<double>(power.size()));
}

double spectral_centroid(std::span<const double> power, double bin_hz) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < power.size(); ++k) {
    num += static_cast<double>(k) * bin_hz * power[k];
    den += power[k];
  }
  return den > 0.0 ? num / den : 0.0;
}

double spectral_rolloff(std::span<const double> power, double bin_hz, double fraction) {
  const double total = std::accumulate(power.begin(), power.end(), 0.0);
  if (total <= 0.0) return 0.0;
  const double target = fraction * total;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < power.size(); ++k) {
    cumulative += power[k];
    if (cumulative >= target) return static_cast<double>(k) * bin_hz;
  }
  return static_cast<double>(power.size() - 1) * bin_hz;
}

double spectral_flux(std::span<const double> previous_power, std::span<const double> power) {
  auto unit_norm = [](std::span<const double> p) {
    double s = 0.0;
    for (double v : p) s += v;  // sum of |X|^2 is the squared L2 norm of |X|
    return s > 0.0 ? 1.0 / std::sqrt(s) : 0.0;
  };
  const double a = unit_norm(previous_power);
  const double b = unit_norm(power);
  double acc = 0.0;
  for (std::size_t k = 0; k < power.size(); ++k) {
    const double d = std::sqrt(power[k]) * b - std::sqrt(previous_power[k]) * a;
    acc += d * d;
  }
  return std::sqrt(acc);
}

std::vector<SpectralShape> spectral_shape(const SubframeGrid& grid, const FeatureConfig& config) {
  std::vector<SpectralShape> out(grid.count);
  const double bin_hz = grid.bin_hz();
  for (std::size_t t = 0; t < grid.count; ++t) {
    const auto p = grid.power_spectrum(t);
    out[t].entropy = spectral_entropy(p);
    out[t].centroid = spectral_centroid(p, bin_hz);
    out[t].rolloff = spectral_rolloff(p, bin_hz, config.rolloff_fraction);
    out[t].flux = t == 0 ? 0.0 : spectral_flux(grid.power_spectrum(t - 1), p);
  }
  return out;
}

// --- pitch -----------------------------------------------------------------

namespace {

class PitchTracker {
 public:
  explicit PitchTracker(const FeatureConfig& config)
      : config_(config),
        fft_(next_power_of_two(2 * config.pitch_frame_len)),
        spectrum_(fft_.bins()),
        corr_(fft_.size()),
        centred_(config.pitch_frame_len),
        prefix_(config.pitch_frame_len + 1),
        nccf_(config.pitch_frame_len) {}

  PitchEstimate estimate(std::span<const double> frame) {
    PitchEstimate est;
    const std::size_t n = frame.size();
    const double fs = config_.sample_rate;
    const std::size_t min_lag = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::floor(fs / config_.pitch_max_hz)));
    const std::size_t max_lag = std::min<std::size_t>(
        static_cast<std::size_t>(std::ceil(fs / config_.pitch_min_hz)), n / 2);
    if (max_lag <= min_lag + 1 || n > centred_.size()) return est;

    const double mean = std::accumulate(frame.begin(), frame.end(), 0.0) / static_cast<double>(n);
    prefix_[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      centred_[i] = frame[i] - mean;
      prefix_[i + 1] = prefix_[i] + centred_[i] * centred_[i];
    }
    const double energy = prefix_[n];
    if (!(energy > 1e-18)) return est;

    fft_.forward({centred_.data(), n}, spectrum_);
    for (auto& s : spectrum_) s = std::norm(s);
    fft_.inverse(spectrum_, corr_);

    // nccf_[tau] for tau in [min_lag - 1, max_lag + 1].
    for (std::size_t tau = min_lag - 1; tau <= max_lag + 1 && tau < n; ++tau) {
      const double head = prefix_[n - tau];
      const double tail = energy - prefix_[tau];
      const double den = std::sqrt(head * tail);
      nccf_[tau] = den > energy * 1e-12 ? corr_[tau] / den : 0.0;
    }

    double best = -1.0;
    for (std::size_t tau = min_lag; tau <= max_lag; ++tau) {
      if (is_peak(tau)) best = std::max(best, nccf_[tau]);
    }
    if (best < config_.voicing_threshold) {
      est.peak = std::max(best, 0.0);
      return est;
    }
    std::size_t chosen = 0;
    for (std::size_t tau = min_lag; tau <= max_lag; ++tau) {
      if (is_peak(tau) && nccf_[tau] >= 0.9 * best) {
        chosen = tau;
        break;
      }
    }
    const double left = nccf_[chosen - 1];
    const double mid = nccf_[chosen];
    const double right = nccf_[chosen + 1];
    const double curvature = left - 2.0 * mid + right;
    double offset = 0.0;
    if (curvature < 0.0) offset = std::clamp(0.5 * (left - right) / curvature, -0.5, 0.5);
    est.f0 = fs / (static_cast<double>(chosen) + offset);
    est.peak = mid;
    return est;
  }

 private:
  bool is_peak(std::size_t tau) const {
    return nccf_[tau] > nccf_[tau - 1] && nccf_[tau] >= nccf_[tau + 1];
  }

  const FeatureConfig& config_;
  RealFft fft_;
  std::vector<std::complex<double>> spectrum_;
  std::vector<double> corr_;
  std::vector<double> centred_;
  std::vector<double> prefix_;
  std::vector<double> nccf_;
};

}  // namespace

PitchEstimate estimate_pitch(std::span<const double> frame, const FeatureConfig& config) {
  FeatureConfig local = config;
  local.pitch_frame_len = std::max(frame.size(), std::size_t{1});
  PitchTracker tracker(local);
  return tracker.estimate(frame);
}

double harmonic_frequency(std::span<const double> power, double bin_hz, double f0, int max_harmonic) {
  if (!(f0 > 0.0) || power.size() < 3) return 0.0;
  const long last_bin = static_cast<long>(power.size()) - 1;
  double best_power = -1.0;
  long best_bin = -1;
  for (int h = 2; h <= max_harmonic; ++h) {
    const double f = h * f0;
    const long centre = std::lround(f / bin_hz);
    if (centre > last_bin) break;
    for (long b = centre - 1; b <= centre + 1; ++b) {
      if (b < 1 || b > last_bin) continue;
      if (power[static_cast<std::size_t>(b)] > best_power) {
        best_power = power[static_cast<std::size_t>(b)];
        best_bin = b;
      }
    }
  }
  return best_bin < 0 ? 0.0 : static_cast<double>(best_bin) * bin_hz;
}

// --- LPC / formants --------------------------------------------------------

std::optional<std::vector<double>> levinson_durbin(std::span<const double> autocorr,
                                                   std::size_t order) {
  if (autocorr.size() < order + 1) {
    throw Error(ErrorKind::Validation, "autocorrelation shorter than LPC order + 1");
  }
  std::vector<double> a(order + 1, 0.0);
  a[0] = 1.0;
  double err = autocorr[0];
  if (!(err > 0.0) || !std::isfinite(err)) return std::nullopt;
  std::vector<double> prev(order + 1);
  for (std::size_t i = 1; i <= order; ++i) {
    double acc = autocorr[i];
    for (std::size_t j = 1; j < i; ++j) acc += a[j] * autocorr[i - j];
    const double k = -acc / err;
    if (!(std::abs(k) < 1.0)) return std::nullopt;
    prev = a;
    for (std::size_t j = 1; j < i; ++j) a[j] = prev[j] + k * prev[i - j];
    a[i] = k;
    err *= 1.0 - k * k;
    if (!(err > 0.0)) return std::nullopt;
  }
  return a;
}

std::array<double, 3> formants_from_lpc(std::span<const double> lpc, int sample_rate,
                                        double max_bandwidth_hz) {
  std::array<double, 3> out{};
  const std::size_t p = lpc.size() - 1;
  if (p < 2) return out;
  // Companion matrix of z^p + a1 z^(p-1) + ... + ap.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                                    static_cast<Eigen::Index>(p));
  for (std::size_t j = 0; j < p; ++j) companion(0, static_cast<Eigen::Index>(j)) = -lpc[j + 1] / lpc[0];
  for (std::size_t i = 1; i < p; ++i) companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) return out;

  const double fs = sample_rate;
  std::vector<double> found;
  for (const auto& root : solver.eigenvalues()) {
    if (root.imag() <= 0.0) continue;
    const double radius = std::abs(root);
    if (!(radius > 0.0)) continue;
    const double freq = std::arg(root) * fs / (2.0 * M_PI);
    const double bandwidth = -std::log(radius) * fs / M_PI;
    if (bandwidth < max_bandwidth_hz && freq > 0.0) found.push_back(freq);
  }
  std::sort(found.begin(), found.end());
  for (std::size_t i = 0; i < out.size() && i < found.size(); ++i) out[i] = found[i];
  return out;
}

std::vector<PitchFormants> pitch_and_formants(const SubframeGrid& grid, const FeatureConfig& config,
                                              FeatureDiagnostics* diagnostics) {
  std::vector<PitchFormants> out(grid.count);
  const std::size_t n = grid.source.size();
  const std::size_t pitch_len = std::min(config.pitch_frame_len, n);
  FeatureConfig local = config;
  local.pitch_frame_len = pitch_len;
  PitchTracker tracker(local);
  std::vector<double> autocorr(config.lpc_order + 1);

  for (std::size_t t = 0; t < grid.count; ++t) {
    auto& pf = out[t];
    const std::size_t centre = t * grid.hop + grid.frame_len / 2;
    const std::size_t start =
        std::min(centre > pitch_len / 2 ? centre - pitch_len / 2 : 0, n - pitch_len);
    const auto est = tracker.estimate({grid.source.data() + start, pitch_len});
    pf.f0 = est.f0;
    pf.voiced = est.f0 > 0.0;
    if (pf.voiced) {
      pf.harmonic = harmonic_frequency(grid.power_spectrum(t), grid.bin_hz(), pf.f0, config.max_harmonic);
    }

    const auto frame = grid.frame(t);
    for (std::size_t lag = 0; lag <= config.lpc_order; ++lag) {
      double acc = 0.0;
      for (std::size_t i = lag; i < frame.size(); ++i) acc += frame[i] * frame[i - lag];
      autocorr[lag] = acc;
    }
    const auto lpc = levinson_durbin(autocorr, config.lpc_order);
    if (lpc) {
      pf.formants = formants_from_lpc(*lpc, grid.sample_rate, config.formant_max_bandwidth_hz);
    } else {
      pf.lpc_ok = false;
    }

    if (diagnostics) {
      ++diagnostics->frames;
      if (pf.voiced) ++diagnostics->voiced_frames;
      if (!pf.lpc_ok) ++diagnostics->lpc_failures;
    }
  }
  return out;
}

// --- extraction ------------------------------------------------------------

FeatureExtraction extract_features_detailed(const AnalysisWindow& window, const FeatureConfig& config) {
  config.validate();
  if (window.samples.size() != kWindowSamples || config.sample_rate != kSampleRate) {
    throw Error(ErrorKind::Validation, "analysis window must be exactly 10 s at 16 kHz");
  }
  for (double x : window.samples) {
    if (!std::isfinite(x)) {
      throw Error(ErrorKind::Validation, "non-finite sample in window " +
                                             std::to_string(window.index) + " of '" +
                                             window.patient_id + "'");
    }
  }

  FeatureExtraction ex;
  auto& v = ex.vector;
  v.patient_id = window.patient_id;
  v.window_index = window.index;
  v.label = window.label;

  ex.time = time_features(window.samples, config.energy_blocks);
  v.values[feature_index::kEnergy] = ex.time.energy;
  v.values[feature_index::kEnergyEntropy] = ex.time.entropy;
  v.values[feature_index::kZcr] = ex.time.zcr;

  const auto grid = make_subframe_grid(window.samples, config);
  auto& fr = ex.frames;
  fr.mfcc = mfcc(grid, config);
  fr.delta = delta_mfcc(fr.mfcc, config.delta_half_width);
  fr.chroma = chroma(grid, config);
  fr.shape = spectral_shape(grid, config);
  fr.pitch = pitch_and_formants(grid, config, &ex.diagnostics);

  const auto mfcc_mean = mean_of(fr.mfcc);
  const auto delta_mean = mean_of(fr.delta);
  const auto chroma_mean = mean_of(fr.chroma);
  for (std::size_t k = 0; k < kMfccCount; ++k) {
    v.values[feature_index::kMfcc1 + k] = mfcc_mean[k];
    v.values[feature_index::kDeltaMfcc1 + k] = delta_mean[k];
  }
  for (std::size_t k = 0; k < kChromaCount; ++k) v.values[feature_index::kChromaC + k] = chroma_mean[k];

  SpectralShape shape_sum;
  for (const auto& s : fr.shape) {
    shape_sum.entropy += s.entropy;
    shape_sum.flux += s.flux;
    shape_sum.centroid += s.centroid;
    shape_sum.rolloff += s.rolloff;
  }
  const double frames = static_cast<double>(fr.shape.size());
  v.values[feature_index::kSpectralEntropy] = shape_sum.entropy / frames;
  v.values[feature_index::kSpectralFlux] = shape_sum.flux / frames;
  v.values[feature_index::kSpectralCentroid] = shape_sum.centroid / frames;
  v.values[feature_index::kSpectralRolloff] = shape_sum.rolloff / frames;

  std::array<double, 3> formant_sum{};
  double f0_sum = 0.0;
  double harmonic_sum = 0.0;
  std::size_t voiced = 0;
  for (const auto& p : fr.pitch) {
    for (std::size_t i = 0; i < 3; ++i) formant_sum[i] += p.formants[i];
    if (p.voiced) {
      f0_sum += p.f0;
      harmonic_sum += p.harmonic;
      ++voiced;
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    v.values[feature_index::kFormant1 + i] = formant_sum[i] / static_cast<double>(fr.pitch.size());
  }
  if (voiced > 0) {
    v.values[feature_index::kF0] = f0_sum / static_cast<double>(voiced);
    v.values[feature_index::kHarmonic] = harmonic_sum / static_cast<double>(voiced);
  }
  return ex;
}

FeatureVector extract_features(const AnalysisWindow& window, const FeatureConfig& config) {
  return extract_features_detailed(window, config).vector;
}

}  // namespace snore
