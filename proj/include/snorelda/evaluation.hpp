#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "snorelda/features.hpp"
#include "snorelda/lda.hpp"
#include "snorelda/metrics.hpp"

namespace snore {

enum class ExperimentKind { SnoreVsOther, OsaVsSimple, Direct3Class };
enum class Balancing { None, PerPatientEqual };
enum class SelectionMode { AllFeatures, ForwardSelection };

std::string_view to_string(ExperimentKind kind);  // "snore-vs-other", ...
std::optional<ExperimentKind> parse_experiment_kind(std::string_view text);
std::string_view to_string(SelectionMode mode);   // "all" / "forward"
std::optional<SelectionMode> parse_selection_mode(std::string_view text);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::SnoreVsOther;
  Balancing balancing = Balancing::None;
  SelectionMode selection = SelectionMode::ForwardSelection;
  std::uint64_t seed = 0;
  std::size_t inner_folds = 10;
  double selection_tolerance = 0.001;
  std::size_t ci_resamples = 1000;
  double ci_level = 0.95;
  PriorMode priors = PriorMode::Empirical;

  /// Spec with the balancing and priors each experiment implies: the
  /// OSA-vs-simple experiment balances per patient and uses uniform priors.
  static ExperimentSpec for_kind(ExperimentKind kind, SelectionMode selection, std::uint64_t seed);

  void validate() const;
};

/// Feature rows mapped onto one experiment's target classes.
struct Dataset {
  std::vector<std::string> classes;
  std::size_t positive_class = 0;
  std::vector<FeatureVector> rows;
  std::vector<int> targets;

  std::size_t size() const { return rows.size(); }
  /// Patient ids in first-appearance order.
  std::vector<std::string> patients() const;
};

std::vector<std::string> experiment_classes(ExperimentKind kind);

/// Drops windows whose label the experiment does not use. Unlabeled rows are
/// a validation error.
Dataset map_for_experiment(std::span<const FeatureVector> rows, ExperimentKind kind);

/// Per patient, undersamples every class down to the patient's smallest
/// class count without replacement. Retained rows keep their input order.
Dataset balance_per_patient(const Dataset& data, std::uint64_t seed);

/// "patient#window" identity used by the leakage check.
std::string window_id(const FeatureVector& fv);

struct SelectionStep {
  std::size_t feature = 0;
  double inner_accuracy = 0.0;
};

/// Sequential forward selection scored by mean accuracy over patient-grouped
/// inner folds. `forbidden_ids` (the outer test windows) must not occur in
/// any inner fold; if one does, a Leakage error is thrown.
std::vector<std::size_t> inner_feature_selection(
    const Dataset& training, const ExperimentSpec& spec, std::uint64_t seed,
    const std::unordered_set<std::string>* forbidden_ids = nullptr,
    std::vector<SelectionStep>* trace = nullptr);

/// Data handed to one outer fold. Exposed so tests can tamper with it.
struct FoldData {
  std::size_t fold_index = 0;
  std::string test_patient;
  Dataset training;
  Dataset test;
};

struct CvOptions {
  std::size_t threads = 1;
  /// Called on each fold's data before the leakage check.
  std::function<void(FoldData&)> before_fold;
};

struct WindowPrediction {
  std::size_t window_index = 0;
  int truth = 0;
  int predicted = 0;
};

struct FoldResult {
  std::string test_patient;
  std::vector<std::size_t> selected_features;
  ConfusionMatrix confusion;
  std::vector<WindowPrediction> predictions;
};

struct ReportRow {
  std::string statistic;  // e.g. "accuracy", "osa_snore sensitivity"
  Rate value;
  std::optional<Interval> ci;
};

struct CvReport {
  ExperimentSpec spec;
  std::vector<std::string> classes;
  std::size_t positive_class = 0;
  std::vector<FoldResult> folds;
  std::vector<std::string> skipped_patients;
  ConfusionMatrix pooled;
  std::vector<ReportRow> rows;
  std::array<std::size_t, kFeatureCount> selection_tally{};
  double mean_selected_features = 0.0;
  std::string config_digest;

  std::optional<double> accuracy() const;
};

/// Experiment mapping plus, for balanced experiments, skipping patients that
/// lack a class and per-patient undersampling. Fold order follows
/// Dataset::patients() of the result.
Dataset prepare_dataset(std::span<const FeatureVector> rows, const ExperimentSpec& spec,
                        std::vector<std::string>* skipped = nullptr);

/// Feature selection (if enabled) and the final fit for one training set.
LdaModel fit_fold_model(const Dataset& training, const ExperimentSpec& spec, std::uint64_t fold_seed,
                        const std::unordered_set<std::string>* forbidden_ids = nullptr);

/// The model outer_loop builds for the fold that holds out `held_out`, or a
/// model on every patient when no patient is held out.
LdaModel train_model(std::span<const FeatureVector> rows, const ExperimentSpec& spec,
                     const std::optional<std::string>& held_out = std::nullopt);

/// Leave-one-patient-out evaluation with optional nested feature selection.
CvReport outer_loop(std::span<const FeatureVector> rows, const ExperimentSpec& spec,
                    const CvOptions& options = {});

/// Table-shaped rows: binary experiments report accuracy, sensitivity,
/// specificity, PPV and NPV; the 3-class experiment reports accuracy plus
/// per-class sensitivity and PPV. CIs bootstrap patients.
std::vector<ReportRow> summarize(const std::vector<FoldResult>& folds, std::size_t classes,
                                 std::size_t positive_class, const std::vector<std::string>& names,
                                 const ExperimentSpec& spec);

std::string report_to_json(const CvReport& report);
std::string report_to_csv(const CvReport& report);

}  // namespace snore
