#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "snorelda/audio_io.hpp"

namespace snore {

/// Acoustic recipe for one snore class: bursts of a glottal-like pulse train
/// through three resonators, separated by silent gaps.
struct SnoreRecipe {
  double f0_min_hz = 70.0;
  double f0_max_hz = 128.0;
  double burst_min_s = 0.8;
  double burst_max_s = 1.5;
  double gap_min_s = 1.6;
  double gap_max_s = 3.0;
  std::array<double, 3> formants_hz{490.0, 1160.0, 2460.0};
  std::array<double, 3> bandwidths_hz{90.0, 120.0, 160.0};
};

/// Defaults give overlapping classes: OSA snores are lower, sparser bursts
/// with slightly lower resonances; Other segments hold breathing or faint
/// unscored snoring over room noise.
struct SynthSpec {
  std::size_t n_patients = 10;
  std::size_t windows_per_class_per_patient = 30;
  std::uint64_t seed = 1;

  SnoreRecipe osa{};
  SnoreRecipe simple{82.0, 148.0, 0.9, 1.6, 1.0, 2.4, {535.0, 1240.0, 2540.0}, {90.0, 120.0, 160.0}};

  double snr_db = 10.0;              // snore burst RMS over ambient RMS
  double ambient_rms = 0.003;
  double breathing_fraction = 0.5;   // share of Other segments that hold breathing
  double faint_snore_fraction = 0.4;  // share of Other segments with unscored faint snoring
  double faint_snore_db = -9.0;       // faint snoring level relative to scored snores
  double breathing_cutoff_hz = 600.0;
  double breathing_level_db = -2.0;  // breathing RMS relative to snore RMS
  double formant_jitter = 0.08;      // per-patient relative resonator shift
  double patient_gain_jitter = 0.2;  // per-patient relative level shift
  double segment_level_jitter_db = 8.0;  // per-segment level spread, +/- dB

  void validate() const;
};

struct SynthCorpus {
  std::vector<Recording> recordings;
  std::vector<LabeledEvent> labels;
};

std::string synth_patient_id(std::size_t index);

/// One recording per patient made of labeled 10 s segments in shuffled
/// order. Samples are already on the 16-bit PCM grid, so writing and
/// re-reading the WAV returns identical values.
SynthCorpus generate_corpus(const SynthSpec& spec);

/// Writes <patient>.wav for every recording and labels.csv into `dir`.
void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir,
                  const std::string& comment = {});

}  // namespace snore
