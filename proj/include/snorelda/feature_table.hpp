#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "snorelda/features.hpp"

namespace snore {

/// Feature CSV: an optional "# config_digest=<hex>" comment, then the header
/// patient_id,window_index,label,f0..f49 and one row per window. Values are
/// written in shortest round-trip form.
struct FeatureTable {
  std::vector<FeatureVector> rows;
  std::string config_digest;
};

std::string format_features_csv(std::span<const FeatureVector> rows, const std::string& config_digest);
FeatureTable parse_features_csv(std::string_view text);
FeatureTable read_features_csv(const std::filesystem::path& path);

}  // namespace snore
