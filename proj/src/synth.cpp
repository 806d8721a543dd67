#include "snorelda/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "snorelda/error.hpp"
#include "snorelda/random.hpp"
#include "snorelda/text.hpp"

namespace snore {
namespace {

constexpr double kFs = kSampleRate;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double rms(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return x.empty() ? 0.0 : std::sqrt(s / static_cast<double>(x.size()));
}

/// Two-pole resonator with unit gain at its centre frequency.
void resonate(std::vector<double>& x, double freq, double bandwidth) {
  const double r = std::exp(-M_PI * bandwidth / kFs);
  const double theta = 2.0 * M_PI * freq / kFs;
  const double a1 = 2.0 * r * std::cos(theta);
  const double a2 = -r * r;
  const double gain = std::abs(std::polar(1.0, 0.0) - std::polar(a1, -theta) - std::polar(a2, -2.0 * theta));
  double y1 = 0.0;
  double y2 = 0.0;
  for (double& v : x) {
    const double y = gain * v + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

struct PatientVoice {
  std::array<double, 3> formant_scale{};
  double gain = 1.0;
};

void add_snore_segment(std::vector<double>& seg, const SnoreRecipe& recipe, const PatientVoice& voice,
                       double target_rms, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double t = uniform(rng, 0.0, recipe.gap_max_s);
  while (t < kWindowSeconds) {
    const double burst_s = uniform(rng, recipe.burst_min_s, recipe.burst_max_s);
    const auto start = static_cast<std::size_t>(t * kFs);
    const auto len = std::min(static_cast<std::size_t>(burst_s * kFs), seg.size() - start);
    if (len < 400) break;

    const double f0 = uniform(rng, recipe.f0_min_hz, recipe.f0_max_hz);
    const double glide = uniform(rng, -0.03, 0.03);
    std::vector<double> burst(len, 0.0);
    double phase = uniform(rng, 0.0, 1.0);
    for (std::size_t i = 0; i < len; ++i) {
      const double frac = static_cast<double>(i) / static_cast<double>(len);
      phase += f0 * (1.0 + glide * (frac - 0.5)) / kFs;
      if (phase >= 1.0) {
        phase -= 1.0;
        burst[i] += 1.0;
      }
      burst[i] += 0.02 * gauss(rng);
    }
    for (std::size_t k = 0; k < 3; ++k) {
      resonate(burst, recipe.formants_hz[k] * voice.formant_scale[k], recipe.bandwidths_hz[k]);
    }
    const double level = rms(burst);
    const double scale = level > 0.0 ? target_rms * voice.gain / level : 0.0;
    const std::size_t ramp = std::max<std::size_t>(1, len / 5);
    for (std::size_t i = 0; i < len; ++i) {
      double env = 1.0;
      if (i < ramp) env = std::sin(0.5 * M_PI * static_cast<double>(i) / static_cast<double>(ramp));
      if (len - 1 - i < ramp) env = std::sin(0.5 * M_PI * static_cast<double>(len - 1 - i) / static_cast<double>(ramp));
      seg[start + i] += scale * env * env * burst[i];
    }
    t += burst_s + uniform(rng, recipe.gap_min_s, recipe.gap_max_s);
  }
}

void add_breathing_segment(std::vector<double>& seg, const SynthSpec& spec, double snore_rms,
                           const PatientVoice& voice, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noise(seg.size());
  // Second-order low-pass (two cascaded one-pole sections).
  const double a = std::exp(-2.0 * M_PI * spec.breathing_cutoff_hz / kFs);
  double s1 = 0.0;
  double s2 = 0.0;
  for (double& v : noise) {
    s1 = (1.0 - a) * gauss(rng) + a * s1;
    s2 = (1.0 - a) * s1 + a * s2;
    v = s2;
  }
  const double period = uniform(rng, 3.5, 5.0);
  const double offset = uniform(rng, 0.0, period);
  std::vector<double> env(seg.size());
  for (std::size_t i = 0; i < seg.size(); ++i) {
    const double cycle = std::fmod(static_cast<double>(i) / kFs + offset, period) / period;
    // Inhale then a weaker exhale, silent pause at the end of the cycle.
    double e = 0.0;
    if (cycle < 0.35) e = std::sin(M_PI * cycle / 0.35);
    else if (cycle < 0.75) e = 0.6 * std::sin(M_PI * (cycle - 0.35) / 0.4);
    env[i] = e * e;
    noise[i] *= env[i];
  }
  const double level = rms(noise);
  const double target = snore_rms * std::pow(10.0, spec.breathing_level_db / 20.0) * voice.gain;
  const double scale = level > 0.0 ? target / level : 0.0;
  for (std::size_t i = 0; i < seg.size(); ++i) seg[i] += scale * noise[i];
}

}  // namespace

void SynthSpec::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::Usage, "synth spec: " + what); };
  if (n_patients == 0) bad("n_patients must be positive");
  if (windows_per_class_per_patient == 0) bad("windows_per_class_per_patient must be positive");
  for (const auto* r : {&osa, &simple}) {
    if (!(r->f0_min_hz > 0.0 && r->f0_min_hz < r->f0_max_hz)) bad("F0 range must satisfy 0 < min < max");
    if (!(r->burst_min_s > 0.0 && r->burst_min_s < r->burst_max_s)) bad("burst range must satisfy 0 < min < max");
    if (!(r->gap_min_s >= 0.0 && r->gap_min_s < r->gap_max_s)) bad("gap range must satisfy 0 <= min < max");
    if (r->f0_max_hz * 2.0 >= kFs / 2.0) bad("F0 too high");
    for (std::size_t k = 0; k < 3; ++k) {
      if (!(r->formants_hz[k] > 0.0 && r->formants_hz[k] < kFs / 2.0)) bad("formant outside (0, Nyquist)");
      if (!(r->bandwidths_hz[k] > 0.0)) bad("bandwidth must be positive");
    }
  }
  if (!std::isfinite(snr_db)) bad("snr_db must be finite");
  if (!(ambient_rms > 0.0 && ambient_rms < 0.1)) bad("ambient_rms must be in (0, 0.1)");
  if (!(breathing_fraction >= 0.0 && breathing_fraction <= 1.0)) bad("breathing_fraction must be in [0, 1]");
  if (!(faint_snore_fraction >= 0.0 && breathing_fraction + faint_snore_fraction <= 1.0)) {
    bad("faint_snore_fraction must be >= 0 and sum with breathing_fraction to at most 1");
  }
  if (!std::isfinite(faint_snore_db)) bad("faint_snore_db must be finite");
  if (!(breathing_cutoff_hz > 0.0 && breathing_cutoff_hz < kFs / 2.0)) bad("breathing cutoff invalid");
  if (!std::isfinite(breathing_level_db)) bad("breathing_level_db must be finite");
  if (!(formant_jitter >= 0.0 && formant_jitter < 0.5)) bad("formant_jitter must be in [0, 0.5)");
  if (!(patient_gain_jitter >= 0.0 && patient_gain_jitter < 0.9)) bad("patient_gain_jitter must be in [0, 0.9)");
  if (!(segment_level_jitter_db >= 0.0 && segment_level_jitter_db <= 20.0)) bad("segment_level_jitter_db must be in [0, 20]");
}

std::string synth_patient_id(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "P%03zu", index + 1);
  return buf;
}

SynthCorpus generate_corpus(const SynthSpec& spec) {
  spec.validate();
  SynthCorpus corpus;
  const std::size_t per_class = spec.windows_per_class_per_patient;
  const double snore_rms = spec.ambient_rms * std::pow(10.0, spec.snr_db / 20.0);

  for (std::size_t p = 0; p < spec.n_patients; ++p) {
    std::mt19937_64 rng(derive_seed(spec.seed, p));
    PatientVoice voice;
    for (auto& s : voice.formant_scale) s = 1.0 + uniform(rng, -spec.formant_jitter, spec.formant_jitter);
    voice.gain = 1.0 + uniform(rng, -spec.patient_gain_jitter, spec.patient_gain_jitter);

    std::vector<SoundClass> order;
    for (SoundClass c : kAllClasses) order.insert(order.end(), per_class, c);
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[uniform_below(rng, i + 1)]);

    Recording rec;
    rec.patient_id = synth_patient_id(p);
    rec.samples.reserve(order.size() * kWindowSamples);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t s = 0; s < order.size(); ++s) {
      std::vector<double> seg(kWindowSamples);
      for (double& v : seg) v = spec.ambient_rms * gauss(rng);
      const double level = snore_rms * std::pow(10.0, uniform(rng, -spec.segment_level_jitter_db,
                                                              spec.segment_level_jitter_db) / 20.0);
      switch (order[s]) {
        case SoundClass::OsaSnore:
          add_snore_segment(seg, spec.osa, voice, level, rng);
          break;
        case SoundClass::SimpleSnore:
          add_snore_segment(seg, spec.simple, voice, level, rng);
          break;
        case SoundClass::Other:
          const double pick = uniform(rng, 0.0, 1.0);
          if (pick < spec.breathing_fraction) {
            add_breathing_segment(seg, spec, level, voice, rng);
          } else if (pick < spec.breathing_fraction + spec.faint_snore_fraction) {
            const SnoreRecipe& recipe = uniform(rng, 0.0, 1.0) < 0.5 ? spec.osa : spec.simple;
            add_snore_segment(seg, recipe, voice, level * std::pow(10.0, spec.faint_snore_db / 20.0), rng);
          }
          break;
      }
      for (double v : seg) {
        rec.samples.push_back(quantize_pcm16(static_cast<float>(std::clamp(v, -1.0, 1.0))));
      }
      corpus.labels.push_back({rec.patient_id, static_cast<double>(s) * kWindowSeconds,
                               static_cast<double>(s + 1) * kWindowSeconds, order[s]});
    }
    corpus.recordings.push_back(std::move(rec));
  }
  return corpus;
}

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir, const std::string& comment) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory " + dir.string() + ": " + ec.message());
  for (const auto& rec : corpus.recordings) {
    write_wav_pcm16(dir / (rec.patient_id + ".wav"), rec.samples, rec.sample_rate_hz, comment);
  }
  write_text_file(dir / "labels.csv", format_labels_csv(corpus.labels, comment));
}

}  // namespace snore
