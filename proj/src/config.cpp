#include "snorelda/config.hpp"

#include <openssl/evp.h>

#include <json.hpp>
#include <set>

#include "snorelda/error.hpp"
#include "snorelda/text.hpp"

namespace snore {
namespace {

using ojson = nlohmann::ordered_json;

ojson to_json(const DenoiseConfig& c) {
  return {{"fft_size", c.fft_size}, {"hop", c.hop}, {"alpha", c.alpha},
          {"floor_beta", c.floor_beta}, {"noise_fraction", c.noise_fraction}};
}

ojson to_json(const FeatureConfig& c) {
  return {{"sample_rate", c.sample_rate},
          {"frame_len", c.frame_len},
          {"hop", c.hop},
          {"fft_size", c.fft_size},
          {"energy_blocks", c.energy_blocks},
          {"mel_filters", c.mel_filters},
          {"mel_low_hz", c.mel_low_hz},
          {"mel_high_hz", c.mel_high_hz},
          {"delta_half_width", c.delta_half_width},
          {"log_floor", c.log_floor},
          {"chroma_frame_len", c.chroma_frame_len},
          {"chroma_hop", c.chroma_hop},
          {"chroma_min_hz", c.chroma_min_hz},
          {"rolloff_fraction", c.rolloff_fraction},
          {"pitch_frame_len", c.pitch_frame_len},
          {"pitch_min_hz", c.pitch_min_hz},
          {"pitch_max_hz", c.pitch_max_hz},
          {"voicing_threshold", c.voicing_threshold},
          {"max_harmonic", c.max_harmonic},
          {"lpc_order", c.lpc_order},
          {"formant_max_bandwidth_hz", c.formant_max_bandwidth_hz}};
}

ojson to_json(const ExperimentSpec& s) {
  return {{"kind", std::string(to_string(s.kind))},
          {"selection", std::string(to_string(s.selection))},
          {"seed", s.seed},
          {"inner_folds", s.inner_folds},
          {"selection_tolerance", s.selection_tolerance},
          {"ci_resamples", s.ci_resamples},
          {"ci_level", s.ci_level}};
}

ojson to_json(const SnoreRecipe& r) {
  return {{"f0_min_hz", r.f0_min_hz},       {"f0_max_hz", r.f0_max_hz},
          {"burst_min_s", r.burst_min_s},   {"burst_max_s", r.burst_max_s},
          {"gap_min_s", r.gap_min_s},       {"gap_max_s", r.gap_max_s},
          {"formants_hz", r.formants_hz},   {"bandwidths_hz", r.bandwidths_hz}};
}

ojson to_json(const SynthSpec& s) {
  return {{"n_patients", s.n_patients},
          {"windows_per_class_per_patient", s.windows_per_class_per_patient},
          {"seed", s.seed},
          {"osa", to_json(s.osa)},
          {"simple", to_json(s.simple)},
          {"snr_db", s.snr_db},
          {"ambient_rms", s.ambient_rms},
          {"breathing_fraction", s.breathing_fraction},
          {"faint_snore_fraction", s.faint_snore_fraction},
          {"faint_snore_db", s.faint_snore_db},
          {"breathing_cutoff_hz", s.breathing_cutoff_hz},
          {"breathing_level_db", s.breathing_level_db},
          {"formant_jitter", s.formant_jitter},
          {"patient_gain_jitter", s.patient_gain_jitter},
          {"segment_level_jitter_db", s.segment_level_jitter_db}};
}

/// Reads keys present in `j` into the fields named in `fields`; any other
/// key is an error so typos in config files do not pass silently.
class Reader {
 public:
  Reader(const nlohmann::json& j, std::string section) : j_(j), section_(std::move(section)) {
    if (!j_.is_object()) throw Error(ErrorKind::Validation, "config: '" + section_ + "' must be an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, _] : j_.items()) {
      if (!known_.count(key)) throw Error(ErrorKind::Validation, "config: unknown key '" + section_ + "." + key + "'");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    known_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorKind::Validation, std::string("config: bad value for '") + section_ + "." + key + "'");
    }
  }

  const nlohmann::json* child(const char* key) {
    known_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

 private:
  const nlohmann::json& j_;
  std::string section_;
  std::set<std::string> known_;
};

void read(const nlohmann::json& j, DenoiseConfig& c) {
  Reader r(j, "denoise");
  r.get("fft_size", c.fft_size);
  r.get("hop", c.hop);
  r.get("alpha", c.alpha);
  r.get("floor_beta", c.floor_beta);
  r.get("noise_fraction", c.noise_fraction);
}

void read(const nlohmann::json& j, FeatureConfig& c) {
  Reader r(j, "features");
  r.get("sample_rate", c.sample_rate);
  r.get("frame_len", c.frame_len);
  r.get("hop", c.hop);
  r.get("fft_size", c.fft_size);
  r.get("energy_blocks", c.energy_blocks);
  r.get("mel_filters", c.mel_filters);
  r.get("mel_low_hz", c.mel_low_hz);
  r.get("mel_high_hz", c.mel_high_hz);
  r.get("delta_half_width", c.delta_half_width);
  r.get("log_floor", c.log_floor);
  r.get("chroma_frame_len", c.chroma_frame_len);
  r.get("chroma_hop", c.chroma_hop);
  r.get("chroma_min_hz", c.chroma_min_hz);
  r.get("rolloff_fraction", c.rolloff_fraction);
  r.get("pitch_frame_len", c.pitch_frame_len);
  r.get("pitch_min_hz", c.pitch_min_hz);
  r.get("pitch_max_hz", c.pitch_max_hz);
  r.get("voicing_threshold", c.voicing_threshold);
  r.get("max_harmonic", c.max_harmonic);
  r.get("lpc_order", c.lpc_order);
  r.get("formant_max_bandwidth_hz", c.formant_max_bandwidth_hz);
}

void read(const nlohmann::json& j, ExperimentSpec& s) {
  Reader r(j, "experiment");
  std::string kind(to_string(s.kind));
  std::string selection(to_string(s.selection));
  r.get("kind", kind);
  r.get("selection", selection);
  const auto k = parse_experiment_kind(kind);
  const auto m = parse_selection_mode(selection);
  if (!k) throw Error(ErrorKind::Validation, "config: unknown experiment kind '" + kind + "'");
  if (!m) throw Error(ErrorKind::Validation, "config: unknown selection mode '" + selection + "'");
  ExperimentSpec fresh = ExperimentSpec::for_kind(*k, *m, s.seed);
  fresh.inner_folds = s.inner_folds;
  fresh.selection_tolerance = s.selection_tolerance;
  fresh.ci_resamples = s.ci_resamples;
  fresh.ci_level = s.ci_level;
  s = fresh;
  r.get("seed", s.seed);
  r.get("inner_folds", s.inner_folds);
  r.get("selection_tolerance", s.selection_tolerance);
  r.get("ci_resamples", s.ci_resamples);
  r.get("ci_level", s.ci_level);
}

void read(const nlohmann::json& j, SnoreRecipe& rec, const std::string& name) {
  Reader r(j, "synth." + name);
  r.get("f0_min_hz", rec.f0_min_hz);
  r.get("f0_max_hz", rec.f0_max_hz);
  r.get("burst_min_s", rec.burst_min_s);
  r.get("burst_max_s", rec.burst_max_s);
  r.get("gap_min_s", rec.gap_min_s);
  r.get("gap_max_s", rec.gap_max_s);
  r.get("formants_hz", rec.formants_hz);
  r.get("bandwidths_hz", rec.bandwidths_hz);
}

void read(const nlohmann::json& j, SynthSpec& s) {
  Reader r(j, "synth");
  r.get("n_patients", s.n_patients);
  r.get("windows_per_class_per_patient", s.windows_per_class_per_patient);
  r.get("seed", s.seed);
  if (const auto* c = r.child("osa")) read(*c, s.osa, "osa");
  if (const auto* c = r.child("simple")) read(*c, s.simple, "simple");
  r.get("snr_db", s.snr_db);
  r.get("ambient_rms", s.ambient_rms);
  r.get("breathing_fraction", s.breathing_fraction);
  r.get("faint_snore_fraction", s.faint_snore_fraction);
  r.get("faint_snore_db", s.faint_snore_db);
  r.get("breathing_cutoff_hz", s.breathing_cutoff_hz);
  r.get("breathing_level_db", s.breathing_level_db);
  r.get("formant_jitter", s.formant_jitter);
  r.get("patient_gain_jitter", s.patient_gain_jitter);
  r.get("segment_level_jitter_db", s.segment_level_jitter_db);
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::Validation, "SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string feature_pipeline_json(bool denoise_enabled, const DenoiseConfig& denoise,
                                  const FeatureConfig& features) {
  ojson j;
  j["denoise_enabled"] = denoise_enabled;
  j["denoise"] = to_json(denoise);
  j["features"] = to_json(features);
  return j.dump();
}

std::string feature_pipeline_digest(bool denoise_enabled, const DenoiseConfig& denoise,
                                    const FeatureConfig& features) {
  return sha256_hex(feature_pipeline_json(denoise_enabled, denoise, features));
}

std::string config_to_json(const PipelineConfig& config) {
  ojson j;
  j["denoise_enabled"] = config.denoise_enabled;
  j["denoise"] = to_json(config.denoise);
  j["features"] = to_json(config.features);
  j["experiment"] = to_json(config.experiment);
  j["synth"] = to_json(config.synth);
  j["seed"] = config.seed;
  j["threads"] = config.threads;
  return j.dump(2) + "\n";
}

PipelineConfig config_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("config: invalid JSON: ") + e.what());
  }
  PipelineConfig config;
  Reader r(j, "config");
  r.get("denoise_enabled", config.denoise_enabled);
  r.get("seed", config.seed);
  r.get("threads", config.threads);
  if (const auto* c = r.child("denoise")) read(*c, config.denoise);
  if (const auto* c = r.child("features")) read(*c, config.features);
  if (const auto* c = r.child("experiment")) read(*c, config.experiment);
  if (const auto* c = r.child("synth")) read(*c, config.synth);
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_text_file(path));
}

std::string config_digest(const PipelineConfig& config) {
  PipelineConfig canonical = config;
  canonical.threads = 0;  // thread count never changes outputs
  return sha256_hex(config_to_json(canonical));
}

}  // namespace snore
