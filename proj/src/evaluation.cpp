#include "snorelda/evaluation.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "snorelda/error.hpp"
#include "snorelda/parallel.hpp"
#include "snorelda/random.hpp"

namespace snore {

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::SnoreVsOther: return "snore-vs-other";
    case ExperimentKind::OsaVsSimple: return "osa-vs-simple";
    case ExperimentKind::Direct3Class: return "direct-3class";
  }
  return "snore-vs-other";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view text) {
  for (auto k : {ExperimentKind::SnoreVsOther, ExperimentKind::OsaVsSimple, ExperimentKind::Direct3Class}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(SelectionMode mode) {
  return mode == SelectionMode::AllFeatures ? "all" : "forward";
}

std::optional<SelectionMode> parse_selection_mode(std::string_view text) {
  if (text == "all") return SelectionMode::AllFeatures;
  if (text == "forward") return SelectionMode::ForwardSelection;
  return std::nullopt;
}

ExperimentSpec ExperimentSpec::for_kind(ExperimentKind kind, SelectionMode selection, std::uint64_t seed) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.selection = selection;
  spec.seed = seed;
  if (kind == ExperimentKind::OsaVsSimple) {
    spec.balancing = Balancing::PerPatientEqual;
    spec.priors = PriorMode::Uniform;
  }
  return spec;
}

void ExperimentSpec::validate() const {
  const bool needs_balance = kind == ExperimentKind::OsaVsSimple;
  if (needs_balance != (balancing == Balancing::PerPatientEqual)) {
    throw Error(ErrorKind::Validation,
                "osa-vs-simple requires per-patient balancing and other experiments forbid it");
  }
  if (inner_folds < 2) throw Error(ErrorKind::Validation, "inner_folds must be >= 2");
  if (!(selection_tolerance >= 0.0)) throw Error(ErrorKind::Validation, "selection_tolerance must be >= 0");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw Error(ErrorKind::Validation, "ci_level must be in (0, 1)");
}

std::vector<std::string> Dataset::patients() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : rows) {
    if (seen.insert(r.patient_id).second) out.push_back(r.patient_id);
  }
  return out;
}

std::vector<std::string> experiment_classes(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::SnoreVsOther: return {"snore", "other"};
    case ExperimentKind::OsaVsSimple: return {"osa_snore", "simple_snore"};
    case ExperimentKind::Direct3Class: return {"osa_snore", "simple_snore", "other"};
  }
  return {};
}

Dataset map_for_experiment(std::span<const FeatureVector> rows, ExperimentKind kind) {
  Dataset data;
  data.classes = experiment_classes(kind);
  data.positive_class = 0;
  for (const auto& r : rows) {
    if (!r.label) {
      throw Error(ErrorKind::Validation, "window " + window_id(r) + " has no label");
    }
    int target = -1;
    switch (kind) {
      case ExperimentKind::SnoreVsOther:
        target = *r.label == SoundClass::Other ? 1 : 0;
        break;
      case ExperimentKind::OsaVsSimple:
        if (*r.label == SoundClass::OsaSnore) target = 0;
        if (*r.label == SoundClass::SimpleSnore) target = 1;
        break;
      case ExperimentKind::Direct3Class:
        target = static_cast<int>(*r.label);
        break;
    }
    if (target < 0) continue;
    data.rows.push_back(r);
    data.targets.push_back(target);
  }
  return data;
}

Dataset balance_per_patient(const Dataset& data, std::uint64_t seed) {
  const std::size_t k = data.classes.size();
  const auto patients = data.patients();
  std::vector<bool> keep(data.size(), false);
  for (std::size_t p = 0; p < patients.size(); ++p) {
    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.rows[i].patient_id == patients[p]) {
        by_class[static_cast<std::size_t>(data.targets[i])].push_back(i);
      }
    }
    std::size_t minority = SIZE_MAX;
    for (const auto& c : by_class) minority = std::min(minority, c.size());
    std::mt19937_64 rng(derive_seed(seed, p));
    for (auto& members : by_class) {
      // Partial Fisher-Yates: the first `minority` slots become the sample.
      for (std::size_t i = 0; i < minority && i + 1 < members.size(); ++i) {
        std::swap(members[i], members[i + uniform_below(rng, members.size() - i)]);
      }
      for (std::size_t i = 0; i < minority; ++i) keep[members[i]] = true;
    }
  }
  Dataset out;
  out.classes = data.classes;
  out.positive_class = data.positive_class;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!keep[i]) continue;
    out.rows.push_back(data.rows[i]);
    out.targets.push_back(data.targets[i]);
  }
  return out;
}

std::string window_id(const FeatureVector& fv) {
  return fv.patient_id + "#" + std::to_string(fv.window_index);
}

namespace {

Eigen::MatrixXd feature_matrix(const Dataset& data, std::span<const std::size_t> rows) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kFeatureCount));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& values = data.rows[rows[r]].values;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) = values[f];
    }
  }
  return x;
}

std::vector<int> targets_of(const Dataset& data, std::span<const std::size_t> rows) {
  std::vector<int> y(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) y[r] = data.targets[rows[r]];
  return y;
}

LdaConfig lda_config(const ExperimentSpec& spec) {
  LdaConfig cfg;
  cfg.priors = spec.priors;
  return cfg;
}

[[noreturn]] void leak(const std::string& id, const std::string& where) {
  throw Error(ErrorKind::Leakage, "held-out window " + id + " found in " + where);
}

struct InnerFold {
  ClassStatistics stats;
  Eigen::MatrixXd validation;
  std::vector<int> validation_targets;
};

}  // namespace

std::vector<std::size_t> inner_feature_selection(const Dataset& training, const ExperimentSpec& spec,
                                                 std::uint64_t seed,
                                                 const std::unordered_set<std::string>* forbidden_ids,
                                                 std::vector<SelectionStep>* trace) {
  auto patients = training.patients();
  if (patients.size() < 2) {
    throw Error(ErrorKind::InsufficientData, "inner selection needs at least two training patients");
  }
  const std::size_t fold_count = std::min(spec.inner_folds, patients.size());

  std::mt19937_64 rng(seed);
  for (std::size_t i = patients.size() - 1; i > 0; --i) {
    std::swap(patients[i], patients[uniform_below(rng, i + 1)]);
  }
  std::map<std::string, std::size_t> fold_of;
  for (std::size_t i = 0; i < patients.size(); ++i) fold_of[patients[i]] = i % fold_count;

  const std::size_t k = training.classes.size();
  std::vector<InnerFold> folds;
  folds.reserve(fold_count);
  for (std::size_t f = 0; f < fold_count; ++f) {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> val_rows;
    std::unordered_set<std::string> train_ids;
    for (std::size_t i = 0; i < training.size(); ++i) {
      const auto& row = training.rows[i];
      const std::string id = window_id(row);
      if (forbidden_ids && forbidden_ids->count(id)) leak(id, "inner fold " + std::to_string(f));
      if (fold_of.at(row.patient_id) == f) {
        val_rows.push_back(i);
      } else {
        train_rows.push_back(i);
        train_ids.insert(id);
      }
    }
    for (std::size_t i : val_rows) {
      const std::string id = window_id(training.rows[i]);
      if (train_ids.count(id)) leak(id, "both sides of inner fold " + std::to_string(f));
    }
    const auto y = targets_of(training, train_rows);
    ClassStatistics stats(feature_matrix(training, train_rows), y, k);
    bool usable = !val_rows.empty();
    for (std::size_t c : stats.counts()) usable = usable && c >= 2;
    if (!usable) continue;
    folds.push_back({std::move(stats), feature_matrix(training, val_rows), targets_of(training, val_rows)});
  }
  if (folds.empty()) {
    throw Error(ErrorKind::InsufficientData, "no inner fold has two samples of every class");
  }

  const LdaConfig lda = lda_config(spec);
  auto score = [&](const std::vector<std::size_t>& subset) -> std::optional<double> {
    double sum = 0.0;
    for (const auto& fold : folds) {
      try {
        const LdaModel model = fit_from_statistics(fold.stats, training.classes, subset, lda);
        std::size_t correct = 0;
        Eigen::VectorXd x(static_cast<Eigen::Index>(subset.size()));
        for (Eigen::Index r = 0; r < fold.validation.rows(); ++r) {
          for (std::size_t j = 0; j < subset.size(); ++j) {
            x(static_cast<Eigen::Index>(j)) = fold.validation(r, static_cast<Eigen::Index>(subset[j]));
          }
          const auto p = model.predict_selected(x);
          if (static_cast<int>(p.class_index) == fold.validation_targets[static_cast<std::size_t>(r)]) ++correct;
        }
        sum += static_cast<double>(correct) / static_cast<double>(fold.validation.rows());
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateData) throw;
        return std::nullopt;
      }
    }
    return sum / static_cast<double>(folds.size());
  };

  std::vector<std::size_t> selected;
  std::vector<bool> used(kFeatureCount, false);
  double current = 0.0;
  while (selected.size() < kFeatureCount) {
    std::optional<double> best;
    std::size_t best_feature = 0;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      if (used[f]) continue;
      auto candidate = selected;
      candidate.push_back(f);
      const auto acc = score(candidate);
      if (acc && (!best || *acc > *best)) {
        best = acc;
        best_feature = f;
      }
    }
    if (!best || *best - current < spec.selection_tolerance) break;
    selected.push_back(best_feature);
    used[best_feature] = true;
    current = *best;
    if (trace) trace->push_back({best_feature, current});
  }
  if (selected.empty()) {
    // Every candidate was degenerate or none beat zero; keep the first usable one.
    selected.push_back(0);
  }
  return selected;
}

std::optional<double> CvReport::accuracy() const {
  for (const auto& r : rows) {
    if (r.statistic == "accuracy") return r.value;
  }
  return std::nullopt;
}

std::vector<ReportRow> summarize(const std::vector<FoldResult>& folds, std::size_t classes,
                                 std::size_t positive_class, const std::vector<std::string>& names,
                                 const ExperimentSpec& spec) {
  ConfusionMatrix pooled(classes);
  for (const auto& f : folds) pooled += f.confusion;
  const MetricSet point = compute_metrics(pooled, positive_class);

  using Extract = std::function<Rate(const MetricSet&)>;
  std::vector<std::pair<std::string, Extract>> stats;
  stats.emplace_back("accuracy", [](const MetricSet& m) { return m.accuracy; });
  if (classes == 2) {
    stats.emplace_back("sensitivity", [](const MetricSet& m) { return m.binary->sensitivity; });
    stats.emplace_back("specificity", [](const MetricSet& m) { return m.binary->specificity; });
    stats.emplace_back("ppv", [](const MetricSet& m) { return m.binary->ppv; });
    stats.emplace_back("npv", [](const MetricSet& m) { return m.binary->npv; });
  } else {
    for (std::size_t c = 0; c < classes; ++c) {
      stats.emplace_back(names[c] + " sensitivity", [c](const MetricSet& m) { return m.per_class[c].sensitivity; });
      stats.emplace_back(names[c] + " ppv", [c](const MetricSet& m) { return m.per_class[c].ppv; });
    }
  }

  std::vector<ReportRow> rows;
  for (std::size_t s = 0; s < stats.size(); ++s) {
    const auto& [name, extract] = stats[s];
    ReportRow row;
    row.statistic = name;
    row.value = extract(point);
    row.ci = bootstrap_interval(
        folds.size(),
        [&](std::span<const std::size_t> idx) -> Rate {
          ConfusionMatrix m(classes);
          for (std::size_t i : idx) m += folds[i].confusion;
          if (m.total() == 0) return std::nullopt;
          return extract(compute_metrics(m, positive_class));
        },
        spec.ci_level, spec.ci_resamples, derive_seed(spec.seed, 0x0C1ull + s));
    // Percentile intervals need not bracket the pooled estimate; widen so they do.
    if (row.ci && row.value) {
      row.ci->lower = std::min(row.ci->lower, *row.value);
      row.ci->upper = std::max(row.ci->upper, *row.value);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Dataset prepare_dataset(std::span<const FeatureVector> input, const ExperimentSpec& spec,
                        std::vector<std::string>* skipped) {
  spec.validate();
  Dataset data = map_for_experiment(input, spec.kind);
  const std::size_t k = data.classes.size();
  if (spec.balancing != Balancing::PerPatientEqual) return data;

  // Patients without every class cannot be balanced; they are skipped.
  std::vector<std::string> drop;
  for (const auto& p : data.patients()) {
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.rows[i].patient_id == p) ++counts[static_cast<std::size_t>(data.targets[i])];
    }
    if (std::find(counts.begin(), counts.end(), 0u) != counts.end()) {
      spdlog::warn("patient '{}' lacks a required class for {}; skipped", p, to_string(spec.kind));
      drop.push_back(p);
    }
  }
  if (!drop.empty()) {
    Dataset filtered;
    filtered.classes = data.classes;
    filtered.positive_class = data.positive_class;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (std::find(drop.begin(), drop.end(), data.rows[i].patient_id) != drop.end()) continue;
      filtered.rows.push_back(data.rows[i]);
      filtered.targets.push_back(data.targets[i]);
    }
    data = std::move(filtered);
  }
  if (skipped) *skipped = drop;
  return balance_per_patient(data, spec.seed);
}

LdaModel fit_fold_model(const Dataset& training, const ExperimentSpec& spec, std::uint64_t fold_seed,
                        const std::unordered_set<std::string>* forbidden_ids) {
  std::vector<std::size_t> selected;
  if (spec.selection == SelectionMode::ForwardSelection) {
    selected = inner_feature_selection(training, spec, fold_seed, forbidden_ids);
  } else {
    selected.resize(kFeatureCount);
    std::iota(selected.begin(), selected.end(), std::size_t{0});
  }
  std::vector<std::size_t> all_rows(training.size());
  std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
  return fit_lda(feature_matrix(training, all_rows), training.targets, training.classes, selected,
                 lda_config(spec));
}

LdaModel train_model(std::span<const FeatureVector> input, const ExperimentSpec& spec,
                     const std::optional<std::string>& held_out) {
  const Dataset data = prepare_dataset(input, spec, nullptr);
  const auto patients = data.patients();
  std::uint64_t seed = spec.seed;
  Dataset training;
  training.classes = data.classes;
  training.positive_class = data.positive_class;
  if (held_out) {
    const auto it = std::find(patients.begin(), patients.end(), *held_out);
    if (it == patients.end()) {
      throw Error(ErrorKind::Validation, "held-out patient '" + *held_out + "' not in the feature table");
    }
    seed = spec.seed ^ static_cast<std::uint64_t>(it - patients.begin());
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (held_out && data.rows[i].patient_id == *held_out) continue;
    training.rows.push_back(data.rows[i]);
    training.targets.push_back(data.targets[i]);
  }
  if (training.patients().size() < 2) {
    throw Error(ErrorKind::InsufficientData, "training needs at least 2 patients");
  }
  return fit_fold_model(training, spec, seed, nullptr);
}

CvReport outer_loop(std::span<const FeatureVector> input, const ExperimentSpec& spec, const CvOptions& options) {
  CvReport report;
  report.spec = spec;
  Dataset data = prepare_dataset(input, spec, &report.skipped_patients);
  report.classes = data.classes;
  report.positive_class = data.positive_class;
  const std::size_t k = data.classes.size();

  const auto patients = data.patients();
  if (patients.size() < 3) {
    throw Error(ErrorKind::InsufficientData,
                "leave-one-patient-out needs at least 3 patients; have " + std::to_string(patients.size()));
  }

  std::vector<FoldResult> folds(patients.size());
  parallel_for(patients.size(), options.threads, [&](std::size_t f) {
    FoldData fold;
    fold.fold_index = f;
    fold.test_patient = patients[f];
    fold.training.classes = fold.test.classes = data.classes;
    fold.training.positive_class = fold.test.positive_class = data.positive_class;
    for (std::size_t i = 0; i < data.size(); ++i) {
      Dataset& side = data.rows[i].patient_id == patients[f] ? fold.test : fold.training;
      side.rows.push_back(data.rows[i]);
      side.targets.push_back(data.targets[i]);
    }
    if (options.before_fold) options.before_fold(fold);

    std::unordered_set<std::string> test_ids;
    for (const auto& r : fold.test.rows) test_ids.insert(window_id(r));
    for (const auto& r : fold.training.rows) {
      const std::string id = window_id(r);
      if (test_ids.count(id)) leak(id, "training set of fold " + std::to_string(f));
    }

    const std::uint64_t fold_seed = spec.seed ^ static_cast<std::uint64_t>(f);
    const LdaModel model = fit_fold_model(fold.training, spec, fold_seed, &test_ids);

    FoldResult& result = folds[f];
    result.test_patient = patients[f];
    result.selected_features = model.selected_features();
    result.confusion = ConfusionMatrix(k);
    for (std::size_t i = 0; i < fold.test.size(); ++i) {
      const auto p = model.predict(fold.test.rows[i].values);
      result.confusion.add(static_cast<std::size_t>(fold.test.targets[i]), p.class_index);
      result.predictions.push_back({fold.test.rows[i].window_index, fold.test.targets[i],
                                    static_cast<int>(p.class_index)});
    }
  });

  report.pooled = ConfusionMatrix(k);
  std::size_t selected_total = 0;
  for (const auto& f : folds) {
    report.pooled += f.confusion;
    for (std::size_t feat : f.selected_features) ++report.selection_tally[feat];
    selected_total += f.selected_features.size();
  }
  report.mean_selected_features = static_cast<double>(selected_total) / static_cast<double>(folds.size());
  report.rows = summarize(folds, k, data.positive_class, data.classes, spec);
  report.folds = std::move(folds);
  return report;
}

}  // namespace snore
