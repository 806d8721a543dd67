#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snorelda/types.hpp"

namespace snore {

/// Mono recording in canonical form. Amplitudes are finite and clamped to
/// [-1, 1]; after canonicalization the rate is always 16 kHz.
struct Recording {
  std::string patient_id;
  std::vector<float> samples;
  int sample_rate_hz = kSampleRate;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

struct LabeledEvent {
  std::string patient_id;
  double start_s = 0.0;
  double end_s = 0.0;
  SoundClass label = SoundClass::Other;

  bool operator==(const LabeledEvent&) const = default;
};

/// One 10 s analysis window. Samples are copied out of the recording in
/// double precision so downstream DSP never re-reads the source buffer.
struct AnalysisWindow {
  std::string patient_id;
  std::size_t index = 0;
  double start_s = 0.0;
  std::vector<double> samples;
  std::optional<SoundClass> label;
};

// --- WAV -------------------------------------------------------------------

/// Raw decoded WAV content before canonicalization.
struct DecodedWav {
  int sample_rate_hz = 0;
  int channels = 0;
  std::vector<float> interleaved;
};

DecodedWav decode_wav(std::span<const std::uint8_t> bytes);

/// 16-bit code for a sample: round(x * 32768) clamped to the int16 range.
/// Decoding divides by 32768, so quantize_pcm16 is exactly what survives a
/// write/read cycle.
std::int16_t pcm16_code(float sample);
float quantize_pcm16(float sample);

/// Encodes mono samples as 16-bit PCM. When `comment` is non-empty it is
/// stored in a LIST/INFO ICMT chunk, which readers ignore.
std::vector<std::uint8_t> encode_wav_pcm16(std::span<const float> samples,
                                           int sample_rate_hz,
                                           const std::string& comment = {});

void write_wav_pcm16(const std::filesystem::path& path,
                     std::span<const float> samples, int sample_rate_hz,
                     const std::string& comment = {});

// --- Recordings ------------------------------------------------------------

/// Downmixes, clamps and resamples decoded audio into a canonical Recording.
Recording canonicalize(const DecodedWav& wav, std::string patient_id);

Recording load_recording(const std::filesystem::path& path,
                         std::string patient_id);

/// Windowed-sinc polyphase resampler (Kaiser window). Output length is
/// floor(n * to / from), so exact rate ratios produce exact lengths.
std::vector<float> resample(std::span<const float> input, int from_hz,
                            int to_hz);

// --- Labels ----------------------------------------------------------------

std::vector<LabeledEvent> parse_labels_csv(std::string_view text);
std::vector<LabeledEvent> read_labels_csv(const std::filesystem::path& path);
std::string format_labels_csv(std::span<const LabeledEvent> events,
                              const std::string& comment = {});

/// Throws Validation if any event is malformed or two events of the same
/// patient overlap. Touching intervals are not an overlap.
void validate_labels(std::span<const LabeledEvent> events);

// --- Windowing -------------------------------------------------------------

inline std::size_t window_count(std::size_t sample_count) {
  return sample_count / kWindowSamples;
}

/// Label covering the window [start_s, start_s + 10): the class with the
/// largest covered duration, where unlabeled time counts toward Other.
/// Ties resolve to Other.
SoundClass majority_label(std::span<const LabeledEvent> events, double start_s,
                          double end_s);

/// Copies window `index` out of the recording; the label is left empty.
AnalysisWindow make_window(const Recording& rec, std::size_t index);

/// Labeled windowing; labels must belong to rec.patient_id.
std::vector<AnalysisWindow> window_recording(
    const Recording& rec, std::span<const LabeledEvent> labels);

/// Unlabeled windowing (label left empty).
std::vector<AnalysisWindow> window_recording(const Recording& rec);

}  // namespace snore
