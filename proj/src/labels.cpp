#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "snorelda/audio_io.hpp"
#include "snorelda/error.hpp"
#include "snorelda/text.hpp"

namespace snore {
namespace {

constexpr std::string_view kHeader = "patient_id,start_s,end_s,label";

std::string_view label_token(SoundClass c) {
  switch (c) {
    case SoundClass::OsaSnore: return "osa_snore";
    case SoundClass::SimpleSnore: return "simple_snore";
    case SoundClass::Other: return "other";
  }
  return "other";
}

}  // namespace

std::vector<LabeledEvent> parse_labels_csv(std::string_view text) {
  std::vector<LabeledEvent> events;
  bool header_seen = false;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    std::string_view trimmed = trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (!header_seen) {
      if (trimmed != kHeader) {
        throw Error(ErrorKind::Validation,
                    "label file: expected header '" + std::string(kHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    auto fields = split(trimmed, ',');
    auto where = " (line " + std::to_string(line_no) + ")";
    if (fields.size() != 4) {
      throw Error(ErrorKind::Validation, "label file: expected 4 fields" + where);
    }
    LabeledEvent ev;
    ev.patient_id = std::string(trim(fields[0]));
    auto start = parse_double(trim(fields[1]));
    auto end = parse_double(trim(fields[2]));
    auto label = parse_sound_class(trim(fields[3]));
    if (ev.patient_id.empty()) {
      throw Error(ErrorKind::Validation, "label file: empty patient_id" + where);
    }
    if (!start || !end) {
      throw Error(ErrorKind::Validation, "label file: bad time value" + where);
    }
    if (!label) {
      throw Error(ErrorKind::Validation,
                  "label file: unknown label '" + std::string(fields[3]) + "'" + where);
    }
    ev.start_s = *start;
    ev.end_s = *end;
    ev.label = *label;
    events.push_back(std::move(ev));
  }
  if (!header_seen) throw Error(ErrorKind::Validation, "label file: missing header");
  validate_labels(events);
  return events;
}

std::vector<LabeledEvent> read_labels_csv(const std::filesystem::path& path) {
  return parse_labels_csv(read_text_file(path));
}

std::string format_labels_csv(std::span<const LabeledEvent> events,
                              const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += kHeader;
  out += '\n';
  for (const auto& ev : events) {
    out += ev.patient_id;
    out += ',';
    out += format_double(ev.start_s);
    out += ',';
    out += format_double(ev.end_s);
    out += ',';
    out += label_token(ev.label);
    out += '\n';
  }
  return out;
}

void validate_labels(std::span<const LabeledEvent> events) {
  std::map<std::string, std::vector<const LabeledEvent*>> by_patient;
  for (const auto& ev : events) {
    if (!std::isfinite(ev.start_s) || !std::isfinite(ev.end_s) || ev.start_s < 0.0) {
      throw Error(ErrorKind::Validation,
                  "event for '" + ev.patient_id + "' has invalid start time");
    }
    if (!(ev.end_s > ev.start_s)) {
      throw Error(ErrorKind::Validation, "event for '" + ev.patient_id + "' at " +
                                             format_double(ev.start_s) +
                                             " s has end_s <= start_s");
    }
    by_patient[ev.patient_id].push_back(&ev);
  }
  for (auto& [patient, list] : by_patient) {
    std::sort(list.begin(), list.end(), [](const auto* a, const auto* b) {
      return a->start_s < b->start_s;
    });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i]->start_s < list[i - 1]->end_s) {
        throw Error(ErrorKind::Validation,
                    "overlapping events for patient '" + patient + "' at " +
                        format_double(list[i]->start_s) + " s");
      }
    }
  }
}

}  // namespace snore
