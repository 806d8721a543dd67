#include "snorelda/audio_io.hpp"

#include <algorithm>
#include <cmath>

#include "snorelda/error.hpp"
#include "snorelda/text.hpp"

namespace snore {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "io error";
    case ErrorKind::Decode: return "decode error";
    case ErrorKind::EmptyInput: return "empty input";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::UnderpopulatedClass: return "underpopulated class";
    case ErrorKind::DegenerateData: return "degenerate data";
    case ErrorKind::SchemaMismatch: return "schema mismatch";
    case ErrorKind::Leakage: return "leakage detected";
    case ErrorKind::Usage: return "usage error";
  }
  return "error";
}

std::string_view to_string(SoundClass c) {
  switch (c) {
    case SoundClass::OsaSnore: return "osa_snore";
    case SoundClass::SimpleSnore: return "simple_snore";
    case SoundClass::Other: return "other";
  }
  return "other";
}

std::optional<SoundClass> parse_sound_class(std::string_view text) {
  for (SoundClass c : kAllClasses) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

Recording canonicalize(const DecodedWav& wav, std::string patient_id) {
  if (wav.channels <= 0 || wav.sample_rate_hz <= 0) {
    throw Error(ErrorKind::Decode, "invalid channel count or sample rate");
  }
  const std::size_t channels = static_cast<std::size_t>(wav.channels);
  const std::size_t frames = wav.interleaved.size() / channels;
  if (frames == 0) throw Error(ErrorKind::EmptyInput, "recording has no samples");

  std::vector<float> mono(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      float v = wav.interleaved[i * channels + c];
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::Decode, "non-finite sample in recording");
      }
      acc += v;
    }
    mono[i] = static_cast<float>(std::clamp(acc / static_cast<double>(channels), -1.0, 1.0));
  }

  Recording rec;
  rec.patient_id = std::move(patient_id);
  if (wav.sample_rate_hz != kSampleRate) {
    rec.samples = resample(mono, wav.sample_rate_hz, kSampleRate);
    for (float& s : rec.samples) s = std::clamp(s, -1.0f, 1.0f);
    if (rec.samples.empty()) {
      throw Error(ErrorKind::EmptyInput, "recording too short to resample");
    }
  } else {
    rec.samples = std::move(mono);
  }
  rec.sample_rate_hz = kSampleRate;
  return rec;
}

Recording load_recording(const std::filesystem::path& path, std::string patient_id) {
  auto bytes = read_binary_file(path);
  try {
    return canonicalize(decode_wav(bytes), std::move(patient_id));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

SoundClass majority_label(std::span<const LabeledEvent> events, double start_s,
                          double end_s) {
  std::array<double, 3> coverage{};
  double covered = 0.0;
  for (const auto& ev : events) {
    double overlap = std::min(end_s, ev.end_s) - std::max(start_s, ev.start_s);
    if (overlap <= 0.0) continue;
    coverage[static_cast<std::size_t>(ev.label)] += overlap;
    covered += overlap;
  }
  coverage[static_cast<std::size_t>(SoundClass::Other)] +=
      std::max(0.0, (end_s - start_s) - covered);

  constexpr double kTieTolerance = 1e-9;
  double best = *std::max_element(coverage.begin(), coverage.end());
  int leaders = 0;
  SoundClass winner = SoundClass::Other;
  for (SoundClass c : kAllClasses) {
    if (coverage[static_cast<std::size_t>(c)] >= best - kTieTolerance) {
      ++leaders;
      winner = c;
    }
  }
  return leaders == 1 ? winner : SoundClass::Other;
}

AnalysisWindow make_window(const Recording& rec, std::size_t index) {
  if (rec.sample_rate_hz != kSampleRate) {
    throw Error(ErrorKind::Validation, "recording is not at 16 kHz");
  }
  if (index >= window_count(rec.samples.size())) {
    throw Error(ErrorKind::Validation, "window index out of range");
  }
  AnalysisWindow win;
  win.patient_id = rec.patient_id;
  win.index = index;
  win.start_s = static_cast<double>(index) * kWindowSeconds;
  auto first = rec.samples.begin() + static_cast<std::ptrdiff_t>(index * kWindowSamples);
  win.samples.assign(first, first + static_cast<std::ptrdiff_t>(kWindowSamples));
  return win;
}

std::vector<AnalysisWindow> window_recording(const Recording& rec,
                                             std::span<const LabeledEvent> labels) {
  for (const auto& ev : labels) {
    if (ev.patient_id != rec.patient_id) {
      throw Error(ErrorKind::Validation, "label for patient '" + ev.patient_id +
                                             "' passed with recording of '" +
                                             rec.patient_id + "'");
    }
  }
  validate_labels(labels);
  auto windows = window_recording(rec);
  for (auto& win : windows) {
    win.label = majority_label(labels, win.start_s, win.start_s + kWindowSeconds);
  }
  return windows;
}

std::vector<AnalysisWindow> window_recording(const Recording& rec) {
  std::vector<AnalysisWindow> windows;
  const std::size_t n = window_count(rec.samples.size());
  windows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) windows.push_back(make_window(rec, i));
  return windows;
}

}  // namespace snore
