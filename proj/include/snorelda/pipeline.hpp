#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "snorelda/audio_io.hpp"
#include "snorelda/config.hpp"
#include "snorelda/features.hpp"
#include "snorelda/lda.hpp"

namespace snore {

/// Denoises (when enabled) and extracts one feature row per full window.
/// `labels` may hold other patients' events; only this patient's are used.
/// Pass an empty span with `labeled == false` for unlabeled recordings.
std::vector<FeatureVector> recording_features(const Recording& rec,
                                              std::span<const LabeledEvent> labels,
                                              bool labeled, const PipelineConfig& config,
                                              FeatureDiagnostics* diagnostics = nullptr);

/// <stem>.wav files of a directory in name order.
std::vector<std::filesystem::path> list_wavs(const std::filesystem::path& dir);

/// Features for every WAV in `dir` labeled by `labels`. Every recording
/// must have labels and every labeled patient a recording; otherwise a
/// Validation error names the offenders.
std::vector<FeatureVector> extract_directory(const std::filesystem::path& dir,
                                             std::span<const LabeledEvent> labels,
                                             const PipelineConfig& config);

struct PredictedEvent {
  std::string patient_id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string label;
};

/// Per-window class indices merged into maximal same-label runs.
std::vector<PredictedEvent> merge_windows(const std::string& patient_id,
                                          std::span<const std::size_t> window_classes,
                                          const std::vector<std::string>& class_names);

std::string format_events_csv(std::span<const PredictedEvent> events, const std::string& comment);

/// Applies `model` to every window of an unlabeled recording.
std::vector<std::size_t> classify_recording(const LdaModel& model, const Recording& rec,
                                            const PipelineConfig& config);

}  // namespace snore
