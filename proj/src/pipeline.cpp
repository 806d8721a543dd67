#include "snorelda/pipeline.hpp"

#include <algorithm>
#include <set>

#include "snorelda/denoise.hpp"
#include "snorelda/error.hpp"
#include "snorelda/parallel.hpp"
#include "snorelda/text.hpp"

namespace snore {

std::vector<FeatureVector> recording_features(const Recording& input,
                                              std::span<const LabeledEvent> labels,
                                              bool labeled, const PipelineConfig& config,
                                              FeatureDiagnostics* diagnostics) {
  config.features.validate();
  const Recording rec = config.denoise_enabled ? denoise(input, config.denoise) : input;

  std::vector<LabeledEvent> mine;
  for (const auto& ev : labels) {
    if (ev.patient_id == rec.patient_id) mine.push_back(ev);
  }

  const std::size_t n = window_count(rec.samples.size());
  std::vector<FeatureVector> rows(n);
  std::vector<FeatureDiagnostics> diag(n);
  parallel_for(n, config.threads, [&](std::size_t i) {
    AnalysisWindow win = make_window(rec, i);
    if (labeled) win.label = majority_label(mine, win.start_s, win.start_s + kWindowSeconds);
    auto out = extract_features_detailed(win, config.features);
    rows[i] = std::move(out.vector);
    diag[i] = out.diagnostics;
  });
  if (diagnostics) {
    for (const auto& d : diag) {
      diagnostics->frames += d.frames;
      diagnostics->voiced_frames += d.voiced_frames;
      diagnostics->lpc_failures += d.lpc_failures;
    }
  }
  return rows;
}

std::vector<std::filesystem::path> list_wavs(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorKind::Io, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<FeatureVector> extract_directory(const std::filesystem::path& dir,
                                             std::span<const LabeledEvent> labels,
                                             const PipelineConfig& config) {
  validate_labels(labels);
  const auto wavs = list_wavs(dir);
  if (wavs.empty()) throw Error(ErrorKind::EmptyInput, "no WAV files in " + dir.string());

  std::set<std::string> recorded;
  for (const auto& w : wavs) recorded.insert(w.stem().string());
  std::set<std::string> labeled;
  for (const auto& ev : labels) labeled.insert(ev.patient_id);

  std::vector<std::string> offenders;
  for (const auto& p : recorded) {
    if (!labeled.count(p)) offenders.push_back(p + " (recording without labels)");
  }
  for (const auto& p : labeled) {
    if (!recorded.count(p)) offenders.push_back(p + " (labels without recording)");
  }
  if (!offenders.empty()) {
    std::string msg = "label/recording patient mismatch:";
    for (const auto& o : offenders) msg += " " + o + ";";
    msg.pop_back();
    throw Error(ErrorKind::Validation, msg);
  }

  std::vector<FeatureVector> rows;
  for (const auto& w : wavs) {
    const Recording rec = load_recording(w, w.stem().string());
    auto part = recording_features(rec, labels, true, config);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return rows;
}

std::vector<PredictedEvent> merge_windows(const std::string& patient_id,
                                          std::span<const std::size_t> window_classes,
                                          const std::vector<std::string>& class_names) {
  std::vector<PredictedEvent> events;
  for (std::size_t i = 0; i < window_classes.size(); ++i) {
    const std::string& name = class_names.at(window_classes[i]);
    const double start = static_cast<double>(i) * kWindowSeconds;
    if (!events.empty() && events.back().label == name) {
      events.back().end_s = start + kWindowSeconds;
    } else {
      events.push_back({patient_id, start, start + kWindowSeconds, name});
    }
  }
  return events;
}

std::string format_events_csv(std::span<const PredictedEvent> events, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += "patient_id,start_s,end_s,label\n";
  for (const auto& ev : events) {
    out += ev.patient_id + "," + format_double(ev.start_s) + "," + format_double(ev.end_s) + "," +
           ev.label + "\n";
  }
  return out;
}

std::vector<std::size_t> classify_recording(const LdaModel& model, const Recording& rec,
                                            const PipelineConfig& config) {
  const auto rows = recording_features(rec, {}, false, config);
  if (rows.empty()) {
    throw Error(ErrorKind::EmptyInput, "recording '" + rec.patient_id + "' is shorter than one window");
  }
  std::vector<std::size_t> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(model.predict(r.values).class_index);
  return out;
}

}  // namespace snore
