#include "snorelda/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <iostream>
#include <optional>
#include <set>

#include "snorelda/audio_io.hpp"
#include "snorelda/config.hpp"
#include "snorelda/denoise.hpp"
#include "snorelda/error.hpp"
#include "snorelda/evaluation.hpp"
#include "snorelda/feature_table.hpp"
#include "snorelda/pipeline.hpp"
#include "snorelda/synth.hpp"
#include "snorelda/text.hpp"

namespace snore {
namespace {

namespace fs = std::filesystem;

int exit_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::Decode:
      return exit_code::kIo;
    case ErrorKind::Usage:
      return exit_code::kUsage;
    case ErrorKind::Leakage:
      return exit_code::kInternal;
    default:
      return exit_code::kData;
  }
}

// Flags that override the loaded configuration when given.
struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;

  bool no_denoise = false;
  std::optional<std::size_t> fft_size, hop;
  std::optional<double> alpha, floor_beta, noise_fraction;

  std::optional<std::string> experiment, selection;
  std::optional<std::size_t> ci_resamples, inner_folds;

  std::optional<std::size_t> patients, windows;
};

void add_denoise_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--fft-size", o.fft_size, "STFT frame length");
  cmd->add_option("--hop", o.hop, "STFT hop");
  cmd->add_option("--alpha", o.alpha, "over-subtraction factor");
  cmd->add_option("--floor-beta", o.floor_beta, "spectral floor");
  cmd->add_option("--noise-fraction", o.noise_fraction, "share of quietest frames used for the noise estimate");
}

void add_pipeline_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_flag("--no-denoise", o.no_denoise, "skip spectral subtraction");
  add_denoise_flags(cmd, o);
}

void add_experiment_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--experiment", o.experiment, "snore-vs-other | osa-vs-simple | direct-3class");
  cmd->add_option("--selection", o.selection, "all | forward");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--inner-folds", o.inner_folds, "inner folds for feature selection");
}

PipelineConfig resolve(const Overrides& o) {
  PipelineConfig c = o.config_path ? load_config(*o.config_path) : PipelineConfig{};
  if (o.threads) c.threads = *o.threads;
  if (o.seed) {
    c.seed = *o.seed;
    c.experiment.seed = *o.seed;
    c.synth.seed = *o.seed;
  }
  if (o.no_denoise) c.denoise_enabled = false;
  if (o.fft_size) c.denoise.fft_size = *o.fft_size;
  if (o.hop) c.denoise.hop = *o.hop;
  if (o.alpha) c.denoise.alpha = *o.alpha;
  if (o.floor_beta) c.denoise.floor_beta = *o.floor_beta;
  if (o.noise_fraction) c.denoise.noise_fraction = *o.noise_fraction;

  if (o.experiment || o.selection) {
    const std::string kind = o.experiment.value_or(std::string(to_string(c.experiment.kind)));
    const std::string mode = o.selection.value_or(std::string(to_string(c.experiment.selection)));
    const auto k = parse_experiment_kind(kind);
    const auto m = parse_selection_mode(mode);
    if (!k) throw Error(ErrorKind::Usage, "unknown experiment '" + kind + "'");
    if (!m) throw Error(ErrorKind::Usage, "unknown selection mode '" + mode + "'");
    ExperimentSpec spec = ExperimentSpec::for_kind(*k, *m, c.experiment.seed);
    spec.inner_folds = c.experiment.inner_folds;
    spec.selection_tolerance = c.experiment.selection_tolerance;
    spec.ci_resamples = c.experiment.ci_resamples;
    spec.ci_level = c.experiment.ci_level;
    c.experiment = spec;
  }
  if (o.ci_resamples) c.experiment.ci_resamples = *o.ci_resamples;
  if (o.inner_folds) c.experiment.inner_folds = *o.inner_folds;
  if (o.patients) c.synth.n_patients = *o.patients;
  if (o.windows) c.synth.windows_per_class_per_patient = *o.windows;

  try {
    c.denoise.validate();
    c.features.validate();
    c.experiment.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Usage, e.what());
  }
  return c;
}

std::string feature_digest(const PipelineConfig& c) {
  return feature_pipeline_digest(c.denoise_enabled, c.denoise, c.features);
}

int cmd_denoise(const Overrides& o, const std::string& in, const std::string& out_path,
                const std::optional<std::string>& reference, std::ostream& out) {
  const PipelineConfig c = resolve(o);
  const Recording rec = load_recording(in, fs::path(in).stem().string());
  const Recording clean = denoise(rec, c.denoise);
  write_wav_pcm16(out_path, clean.samples, clean.sample_rate_hz, "config_digest=" + config_digest(c));
  if (reference) {
    const Recording ref = load_recording(*reference, "reference");
    const std::size_t n = std::min(ref.samples.size(), rec.samples.size());
    const std::span<const float> r(ref.samples.data(), n);
    const double before = snr_db(r, std::span<const float>(rec.samples.data(), n));
    const double after = snr_db(r, std::span<const float>(clean.samples.data(), n));
    out << "snr_before_db=" << format_double(before) << "\n"
        << "snr_after_db=" << format_double(after) << "\n"
        << "snr_gain_db=" << format_double(after - before) << "\n";
  }
  return exit_code::kOk;
}

int cmd_extract(const Overrides& o, const std::string& dir, const std::string& labels_path,
                const std::string& out_path, std::ostream& out) {
  const PipelineConfig c = resolve(o);
  const auto labels = read_labels_csv(labels_path);
  const auto rows = extract_directory(dir, labels, c);
  const std::string digest = feature_digest(c);
  write_text_file(out_path, format_features_csv(rows, digest));

  nlohmann::ordered_json side;
  side["feature_config_digest"] = digest;
  side["config_digest"] = config_digest(c);
  side["config"] = nlohmann::ordered_json::parse(config_to_json(c));
  side["config"].erase("threads");  // not part of the digest; outputs do not depend on it
  side["feature_names"] = feature_names();
  fs::path sidecar = out_path;
  sidecar += ".config.json";
  write_text_file(sidecar, side.dump(2) + "\n");
  out << "rows=" << rows.size() << "\n";
  return exit_code::kOk;
}

int cmd_evaluate(const Overrides& o, const std::string& features, const std::string& json_out,
                 const std::optional<std::string>& csv_out, std::ostream& out) {
  const PipelineConfig c = resolve(o);
  const FeatureTable table = read_features_csv(features);
  std::set<std::string> patients;
  for (const auto& r : table.rows) patients.insert(r.patient_id);
  if (patients.size() < 3) {
    throw Error(ErrorKind::InsufficientData,
                "evaluation holds out one patient per fold and needs at least 3 patients; the table has " +
                    std::to_string(patients.size()));
  }
  CvOptions opts;
  opts.threads = c.threads;
  CvReport report = outer_loop(table.rows, c.experiment, opts);
  report.config_digest = sha256_hex(table.config_digest + "\n" + config_digest(c));
  write_text_file(json_out, report_to_json(report));
  if (csv_out) write_text_file(*csv_out, report_to_csv(report));
  const auto acc = report.accuracy();
  out << "experiment=" << to_string(c.experiment.kind) << " selection=" << to_string(c.experiment.selection)
      << " accuracy=" << (acc ? format_double(*acc) : std::string("undefined")) << "\n";
  return exit_code::kOk;
}

int cmd_train(const Overrides& o, const std::string& features, const std::string& model_out,
              const std::optional<std::string>& exclude, std::ostream& out) {
  const PipelineConfig c = resolve(o);
  const FeatureTable table = read_features_csv(features);
  LdaModel model = train_model(table.rows, c.experiment, exclude);
  model.set_feature_config_digest(table.config_digest);
  write_text_file(model_out, save_model(model));
  out << "selected_features=" << model.selected_features().size() << "\n";
  return exit_code::kOk;
}

int cmd_classify(const Overrides& o, const std::string& model_path, const std::string& wav,
                 const std::string& events_out, std::ostream& out) {
  const PipelineConfig c = resolve(o);
  const LdaModel model = load_model(read_text_file(model_path));
  const std::string digest = feature_digest(c);
  if (model.feature_config_digest() != digest) {
    throw Error(ErrorKind::Validation, "model was trained on features with digest '" +
                                           model.feature_config_digest() +
                                           "' but the current feature configuration has digest '" + digest +
                                           "'");
  }
  const Recording rec = load_recording(wav, fs::path(wav).stem().string());
  const auto classes = classify_recording(model, rec, c);
  const auto events = merge_windows(rec.patient_id, classes, model.classes());
  write_text_file(events_out, format_events_csv(events, "config_digest=" + config_digest(c)));
  out << "windows=" << classes.size() << " events=" << events.size() << "\n";
  return exit_code::kOk;
}

int cmd_synth(const Overrides& o, const std::string& dir, std::ostream& out) {
  const PipelineConfig c = resolve(o);
  try {
    c.synth.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Usage, e.what());
  }
  const SynthCorpus corpus = generate_corpus(c.synth);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir + ": " + ec.message());
  write_corpus(corpus, dir, "config_digest=" + config_digest(c));
  out << "patients=" << corpus.recordings.size() << " events=" << corpus.labels.size() << "\n";
  return exit_code::kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Snore sound classification pipeline", "snorecli"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--threads", o.threads, "worker thread cap");

  std::string in, out_path, dir, labels, features, model;
  std::optional<std::string> reference, summary, exclude;

  auto* den = app.add_subcommand("denoise", "spectral subtraction of one recording");
  den->add_option("input", in, "input WAV")->required();
  den->add_option("output", out_path, "output WAV")->required();
  den->add_option("--reference", reference, "clean reference WAV for the SNR report");
  add_denoise_flags(den, o);

  auto* ext = app.add_subcommand("extract", "features for every labeled recording");
  ext->add_option("wav_dir", dir)->required();
  ext->add_option("labels", labels)->required();
  ext->add_option("output", out_path)->required();
  add_pipeline_flags(ext, o);

  auto* ev = app.add_subcommand("evaluate", "nested leave-one-patient-out evaluation");
  ev->add_option("features", features)->required();
  ev->add_option("--out", out_path, "report JSON")->required();
  ev->add_option("--summary", summary, "summary CSV");
  ev->add_option("--ci-resamples", o.ci_resamples, "bootstrap resamples");
  add_experiment_flags(ev, o);

  auto* tr = app.add_subcommand("train", "fit a model on a feature table");
  tr->add_option("features", features)->required();
  tr->add_option("--out", out_path, "model JSON")->required();
  tr->add_option("--exclude-patient", exclude, "leave this patient out, as its evaluation fold does");
  add_experiment_flags(tr, o);

  auto* cl = app.add_subcommand("classify", "label the windows of an unlabeled recording");
  cl->add_option("model", model)->required();
  cl->add_option("input", in)->required();
  cl->add_option("output", out_path, "events CSV")->required();
  add_pipeline_flags(cl, o);

  auto* sy = app.add_subcommand("synth", "write a synthetic corpus");
  sy->add_option("output_dir", dir)->required();
  sy->add_option("--seed", o.seed, "random seed");
  sy->add_option("--patients", o.patients, "number of patients");
  sy->add_option("--windows", o.windows, "windows per class per patient");

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_code::kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return exit_code::kUsage;
  }

  try {
    if (*den) return cmd_denoise(o, in, out_path, reference, out);
    if (*ext) return cmd_extract(o, dir, labels, out_path, out);
    if (*ev) return cmd_evaluate(o, features, out_path, summary, out);
    if (*tr) return cmd_train(o, features, out_path, exclude, out);
    if (*cl) return cmd_classify(o, model, in, out_path, out);
    if (*sy) return cmd_synth(o, dir, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kFailure;
  }
  return exit_code::kUsage;
}

}  // namespace snore
