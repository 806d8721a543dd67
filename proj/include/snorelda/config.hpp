#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "snorelda/denoise.hpp"
#include "snorelda/evaluation.hpp"
#include "snorelda/features.hpp"
#include "snorelda/synth.hpp"

namespace snore {

/// Everything that determines the pipeline's outputs. Serializable to JSON;
/// command-line flags override values read from a config file.
struct PipelineConfig {
  bool denoise_enabled = true;
  DenoiseConfig denoise;
  FeatureConfig features;
  ExperimentSpec experiment;
  SynthSpec synth;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

std::string sha256_hex(std::string_view data);

/// Canonical JSON of the settings that shape feature values.
std::string feature_pipeline_json(bool denoise_enabled, const DenoiseConfig& denoise,
                                  const FeatureConfig& features);

/// Digest of feature_pipeline_json; models and feature tables carry it so a
/// model is never applied to features computed differently.
std::string feature_pipeline_digest(bool denoise_enabled, const DenoiseConfig& denoise,
                                    const FeatureConfig& features);

std::string config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(std::string_view text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Digest of the full configuration.
std::string config_digest(const PipelineConfig& config);

}  // namespace snore
