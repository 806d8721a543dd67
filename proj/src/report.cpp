#include <json.hpp>

#include "snorelda/evaluation.hpp"
#include "snorelda/text.hpp"

namespace snore {
namespace {

using ojson = nlohmann::ordered_json;

ojson rate_json(const Rate& r) { return r ? ojson(*r) : ojson(nullptr); }

ojson confusion_json(const ConfusionMatrix& m) {
  auto rows = ojson::array();
  for (std::size_t t = 0; t < m.classes(); ++t) {
    auto row = ojson::array();
    for (std::size_t p = 0; p < m.classes(); ++p) row.push_back(m.at(t, p));
    rows.push_back(row);
  }
  return rows;
}

std::string cell(const Rate& r) { return r ? format_double(*r) : "undefined"; }

}  // namespace

std::string report_to_json(const CvReport& report) {
  ojson j;
  j["experiment"] = std::string(to_string(report.spec.kind));
  j["selection"] = std::string(to_string(report.spec.selection));
  j["balancing"] = report.spec.balancing == Balancing::PerPatientEqual ? "per-patient-equal" : "none";
  j["priors"] = report.spec.priors == PriorMode::Uniform ? "uniform" : "empirical";
  j["seed"] = report.spec.seed;
  j["inner_folds"] = report.spec.inner_folds;
  j["selection_tolerance"] = report.spec.selection_tolerance;
  j["ci_level"] = report.spec.ci_level;
  j["ci_resamples"] = report.spec.ci_resamples;
  j["config_digest"] = report.config_digest;
  j["classes"] = report.classes;
  j["positive_class"] = report.classes.at(report.positive_class);
  j["skipped_patients"] = report.skipped_patients;

  auto metrics = ojson::array();
  for (const auto& row : report.rows) {
    ojson m;
    m["statistic"] = row.statistic;
    m["value"] = rate_json(row.value);
    m["ci_lower"] = row.ci ? ojson(row.ci->lower) : ojson(nullptr);
    m["ci_upper"] = row.ci ? ojson(row.ci->upper) : ojson(nullptr);
    metrics.push_back(m);
  }
  j["metrics"] = metrics;
  j["pooled_confusion"] = confusion_json(report.pooled);

  ojson tally;
  const auto& names = feature_names();
  for (std::size_t f = 0; f < kFeatureCount; ++f) tally[names[f]] = report.selection_tally[f];
  j["selection_tally"] = tally;
  j["mean_selected_features"] = report.mean_selected_features;

  auto folds = ojson::array();
  for (const auto& f : report.folds) {
    ojson fj;
    fj["test_patient"] = f.test_patient;
    fj["selected_features"] = f.selected_features;
    fj["confusion"] = confusion_json(f.confusion);
    auto preds = ojson::array();
    for (const auto& p : f.predictions) {
      preds.push_back(ojson::array({p.window_index, report.classes.at(static_cast<std::size_t>(p.truth)),
                                    report.classes.at(static_cast<std::size_t>(p.predicted))}));
    }
    fj["predictions"] = preds;
    folds.push_back(fj);
  }
  j["folds"] = folds;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const CvReport& report) {
  std::string out = "# experiment=" + std::string(to_string(report.spec.kind)) +
                    " selection=" + std::string(to_string(report.spec.selection)) +
                    " seed=" + std::to_string(report.spec.seed) +
                    " folds=" + std::to_string(report.folds.size()) +
                    " mean_selected_features=" + format_double(report.mean_selected_features) +
                    " config_digest=" + report.config_digest + "\n";
  out += "statistic,value,ci_lower,ci_upper\n";
  for (const auto& row : report.rows) {
    out += row.statistic + "," + cell(row.value) + "," +
           (row.ci ? format_double(row.ci->lower) : "undefined") + "," +
           (row.ci ? format_double(row.ci->upper) : "undefined") + "\n";
  }
  return out;
}

}  // namespace snore
