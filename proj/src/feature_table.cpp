#include "snorelda/feature_table.hpp"

#include <cmath>

#include "snorelda/error.hpp"
#include "snorelda/text.hpp"

namespace snore {
namespace {

constexpr std::string_view kDigestPrefix = "# config_digest=";

std::string header() {
  std::string h = "patient_id,window_index,label";
  for (std::size_t i = 0; i < kFeatureCount; ++i) h += ",f" + std::to_string(i);
  return h;
}

}  // namespace

std::string format_features_csv(std::span<const FeatureVector> rows, const std::string& config_digest) {
  std::string out;
  if (!config_digest.empty()) out += std::string(kDigestPrefix) + config_digest + "\n";
  out += header();
  out += '\n';
  for (const auto& r : rows) {
    out += r.patient_id;
    out += ',';
    out += std::to_string(r.window_index);
    out += ',';
    if (r.label) out += to_string(*r.label);
    for (double v : r.values) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

FeatureTable parse_features_csv(std::string_view text) {
  FeatureTable table;
  const std::string expected = header();
  bool header_seen = false;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.substr(0, kDigestPrefix.size()) == kDigestPrefix) {
        table.config_digest = std::string(trim(line.substr(kDigestPrefix.size())));
      }
      continue;
    }
    if (!header_seen) {
      if (line != expected) throw Error(ErrorKind::Validation, "feature file: unexpected header");
      header_seen = true;
      continue;
    }
    const auto where = " (line " + std::to_string(line_no) + ")";
    const auto fields = split(line, ',');
    if (fields.size() != 3 + kFeatureCount) {
      throw Error(ErrorKind::Validation, "feature file: expected " + std::to_string(3 + kFeatureCount) +
                                             " columns" + where);
    }
    FeatureVector fv;
    fv.patient_id = std::string(fields[0]);
    const auto index = parse_int(fields[1]);
    if (fv.patient_id.empty() || !index || *index < 0) {
      throw Error(ErrorKind::Validation, "feature file: bad patient or window index" + where);
    }
    fv.window_index = static_cast<std::size_t>(*index);
    if (!fields[2].empty()) {
      fv.label = parse_sound_class(fields[2]);
      if (!fv.label) throw Error(ErrorKind::Validation, "feature file: unknown label" + where);
    }
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      const auto v = parse_double(fields[3 + i]);
      if (!v || !std::isfinite(*v)) throw Error(ErrorKind::Validation, "feature file: bad value" + where);
      fv.values[i] = *v;
    }
    table.rows.push_back(std::move(fv));
  }
  if (!header_seen) throw Error(ErrorKind::Validation, "feature file: missing header");
  return table;
}

FeatureTable read_features_csv(const std::filesystem::path& path) {
  return parse_features_csv(read_text_file(path));
}

}  // namespace snore
