#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace snore {

enum class PriorMode { Empirical, Uniform };

struct LdaConfig {
  PriorMode priors = PriorMode::Empirical;
  double initial_ridge = 1e-6;  // relative to mean diagonal of the pooled covariance
  double max_ridge = 1e-2;
};

struct Prediction {
  std::size_t class_index = 0;
  std::vector<double> posteriors;
};

/// Per-class counts, sums and pooled within-class scatter for every column
/// of a sample matrix. Any column subset can be turned into a model without
/// revisiting the samples.
class ClassStatistics {
 public:
  ClassStatistics(const Eigen::MatrixXd& samples, std::span<const int> labels,
                  std::size_t class_count);

  std::size_t class_count() const { return counts_.size(); }
  std::size_t dimension() const { return static_cast<std::size_t>(sums_.cols()); }
  const std::vector<std::size_t>& counts() const { return counts_; }
  Eigen::MatrixXd means() const;
  const Eigen::MatrixXd& scatter() const { return scatter_; }

 private:
  std::vector<std::size_t> counts_;
  Eigen::MatrixXd sums_;     // K x D
  Eigen::MatrixXd scatter_;  // D x D, about each sample's class mean
};

/// Gaussian classes sharing one covariance. Immutable once built; all
/// prediction methods are const and safe to call concurrently.
class LdaModel {
 public:
  /// Validates every invariant and precomputes the linear discriminants.
  LdaModel(std::vector<std::string> classes, std::vector<std::size_t> selected_features,
           Eigen::MatrixXd means, Eigen::MatrixXd covariance, Eigen::VectorXd priors,
           std::string feature_config_digest = {});

  const std::vector<std::string>& classes() const { return classes_; }
  const std::vector<std::size_t>& selected_features() const { return selected_; }
  const Eigen::MatrixXd& means() const { return means_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  const Eigen::VectorXd& priors() const { return priors_; }
  const std::string& feature_config_digest() const { return digest_; }
  void set_feature_config_digest(std::string digest) { digest_ = std::move(digest); }

  /// x^T S^-1 mu_k - 0.5 mu_k^T S^-1 mu_k + ln pi_k, on selected features.
  Eigen::VectorXd discriminants(const Eigen::VectorXd& selected_values) const;

  Prediction predict_selected(const Eigen::VectorXd& selected_values) const;

  /// `full_values` is indexed by the canonical feature index.
  Prediction predict(std::span<const double> full_values) const;

 private:
  std::vector<std::string> classes_;
  std::vector<std::size_t> selected_;
  Eigen::MatrixXd means_;       // K x d
  Eigen::MatrixXd covariance_;  // d x d
  Eigen::VectorXd priors_;
  std::string digest_;
  Eigen::MatrixXd weights_;  // d x K
  Eigen::VectorXd offsets_;  // K
};

/// Model on a column subset of precomputed statistics.
LdaModel fit_from_statistics(const ClassStatistics& stats, std::vector<std::string> classes,
                             std::span<const std::size_t> selected, const LdaConfig& config);

/// Rows of `samples` are observations; columns are indexed by `selected`.
/// labels[i] indexes `classes`.
LdaModel fit_lda(const Eigen::MatrixXd& samples, std::span<const int> labels,
                 std::vector<std::string> classes, std::span<const std::size_t> selected,
                 const LdaConfig& config);

inline constexpr int kModelSchemaVersion = 1;

std::string save_model(const LdaModel& model);
LdaModel load_model(std::string_view json_text);

}  // namespace snore
