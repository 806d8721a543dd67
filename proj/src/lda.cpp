#include "snorelda/lda.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <set>

#include "snorelda/error.hpp"
#include "snorelda/features.hpp"

namespace snore {

ClassStatistics::ClassStatistics(const Eigen::MatrixXd& samples, std::span<const int> labels,
                                 std::size_t class_count)
    : counts_(class_count, 0),
      sums_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(class_count), samples.cols())) {
  if (static_cast<std::size_t>(samples.rows()) != labels.size()) {
    throw Error(ErrorKind::Validation, "sample and label counts differ");
  }
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || static_cast<std::size_t>(y) >= class_count) {
      throw Error(ErrorKind::Validation, "label out of range");
    }
    ++counts_[static_cast<std::size_t>(y)];
    sums_.row(y) += samples.row(i);
  }
  const Eigen::MatrixXd mu = means();
  Eigen::MatrixXd centred = samples;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    centred.row(i) -= mu.row(labels[static_cast<std::size_t>(i)]);
  }
  scatter_ = centred.transpose() * centred;
}

Eigen::MatrixXd ClassStatistics::means() const {
  Eigen::MatrixXd mu = sums_;
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    if (counts_[k] > 0) mu.row(static_cast<Eigen::Index>(k)) /= static_cast<double>(counts_[k]);
  }
  return mu;
}

LdaModel::LdaModel(std::vector<std::string> classes, std::vector<std::size_t> selected_features,
                   Eigen::MatrixXd means, Eigen::MatrixXd covariance, Eigen::VectorXd priors,
                   std::string feature_config_digest)
    : classes_(std::move(classes)),
      selected_(std::move(selected_features)),
      means_(std::move(means)),
      covariance_(std::move(covariance)),
      priors_(std::move(priors)),
      digest_(std::move(feature_config_digest)) {
  auto invalid = [](const std::string& what) { throw Error(ErrorKind::Validation, "LDA model: " + what); };
  const auto k = static_cast<Eigen::Index>(classes_.size());
  const auto d = static_cast<Eigen::Index>(selected_.size());
  if (k < 2) invalid("needs at least two classes");
  if (d < 1) invalid("needs at least one feature");
  if (std::set<std::string>(classes_.begin(), classes_.end()).size() != classes_.size()) {
    invalid("duplicate class names");
  }
  std::set<std::size_t> unique(selected_.begin(), selected_.end());
  if (unique.size() != selected_.size()) invalid("duplicate selected feature index");
  if (*unique.rbegin() >= kFeatureCount) invalid("selected feature index out of range");
  if (means_.rows() != k || means_.cols() != d) invalid("means have wrong shape");
  if (covariance_.rows() != d || covariance_.cols() != d) invalid("covariance has wrong shape");
  if (priors_.size() != k) invalid("priors have wrong length");
  if (!means_.allFinite() || !covariance_.allFinite() || !priors_.allFinite()) invalid("non-finite parameter");
  if ((priors_.array() <= 0.0).any() || (priors_.array() > 1.0).any()) invalid("priors must lie in (0, 1]");
  if (std::abs(priors_.sum() - 1.0) > 1e-12) invalid("priors do not sum to 1");
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-10) invalid("covariance not symmetric");

  Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success) invalid("covariance not positive definite");
  weights_ = llt.solve(means_.transpose());
  offsets_.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    offsets_(c) = -0.5 * means_.row(c).dot(weights_.col(c)) + std::log(priors_(c));
  }
}

Eigen::VectorXd LdaModel::discriminants(const Eigen::VectorXd& selected_values) const {
  if (selected_values.size() != static_cast<Eigen::Index>(selected_.size())) {
    throw Error(ErrorKind::Validation, "feature vector has wrong dimension for model");
  }
  Eigen::VectorXd delta(offsets_.size());
  for (Eigen::Index c = 0; c < offsets_.size(); ++c) {
    delta(c) = selected_values.dot(weights_.col(c)) + offsets_(c);
  }
  return delta;
}

Prediction LdaModel::predict_selected(const Eigen::VectorXd& selected_values) const {
  const Eigen::VectorXd delta = discriminants(selected_values);
  Prediction p;
  for (Eigen::Index c = 1; c < delta.size(); ++c) {
    if (delta(c) > delta(static_cast<Eigen::Index>(p.class_index))) {
      p.class_index = static_cast<std::size_t>(c);
    }
  }
  const double top = delta(static_cast<Eigen::Index>(p.class_index));
  p.posteriors.resize(static_cast<std::size_t>(delta.size()));
  double total = 0.0;
  for (Eigen::Index c = 0; c < delta.size(); ++c) {
    const double e = std::exp(delta(c) - top);
    p.posteriors[static_cast<std::size_t>(c)] = e;
    total += e;
  }
  for (double& v : p.posteriors) v /= total;
  return p;
}

Prediction LdaModel::predict(std::span<const double> full_values) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(selected_.size()));
  for (std::size_t i = 0; i < selected_.size(); ++i) {
    if (selected_[i] >= full_values.size()) {
      throw Error(ErrorKind::Validation, "feature vector shorter than model's feature indices");
    }
    x(static_cast<Eigen::Index>(i)) = full_values[selected_[i]];
  }
  if (!x.allFinite()) throw Error(ErrorKind::Validation, "non-finite feature value");
  return predict_selected(x);
}

LdaModel fit_from_statistics(const ClassStatistics& stats, std::vector<std::string> classes,
                             std::span<const std::size_t> selected, const LdaConfig& config) {
  const std::size_t k = stats.class_count();
  if (classes.size() != k) throw Error(ErrorKind::Validation, "class name count mismatch");
  if (k < 2) throw Error(ErrorKind::UnderpopulatedClass, "LDA needs at least two classes");
  std::size_t total = 0;
  for (std::size_t c = 0; c < k; ++c) {
    if (stats.counts()[c] < 2) {
      throw Error(ErrorKind::UnderpopulatedClass,
                  "class '" + classes[c] + "' has " + std::to_string(stats.counts()[c]) +
                      " samples; at least 2 required");
    }
    total += stats.counts()[c];
  }
  const auto d = static_cast<Eigen::Index>(selected.size());
  if (d == 0) throw Error(ErrorKind::Validation, "no features selected");
  for (std::size_t f : selected) {
    if (f >= stats.dimension()) throw Error(ErrorKind::Validation, "selected feature out of range");
  }

  const Eigen::MatrixXd all_means = stats.means();
  Eigen::MatrixXd means(static_cast<Eigen::Index>(k), d);
  Eigen::MatrixXd pooled(d, d);
  const double dof = static_cast<double>(total - k);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto fi = static_cast<Eigen::Index>(selected[static_cast<std::size_t>(i)]);
    means.col(i) = all_means.col(fi);
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto fj = static_cast<Eigen::Index>(selected[static_cast<std::size_t>(j)]);
      pooled(i, j) = stats.scatter()(fi, fj) / dof;
    }
  }
  pooled = 0.5 * (pooled + pooled.transpose());

  if (!(config.initial_ridge > 0.0 && config.initial_ridge <= config.max_ridge)) {
    throw Error(ErrorKind::Validation, "ridge must satisfy 0 < initial_ridge <= max_ridge");
  }
  double scale = pooled.diagonal().mean();
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
  Eigen::MatrixXd covariance;
  bool ok = false;
  for (double ridge = config.initial_ridge; ridge <= config.max_ridge * (1.0 + 1e-9); ridge *= 10.0) {
    covariance = pooled;
    covariance.diagonal().array() += ridge * scale;
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (covariance.allFinite() && llt.info() == Eigen::Success) {
      ok = true;
      break;
    }
  }
  if (!ok) {
    throw Error(ErrorKind::DegenerateData, "pooled covariance is not positive definite even with ridge " +
                                               std::to_string(config.max_ridge));
  }

  Eigen::VectorXd priors(static_cast<Eigen::Index>(k));
  for (std::size_t c = 0; c < k; ++c) {
    priors(static_cast<Eigen::Index>(c)) =
        config.priors == PriorMode::Uniform
            ? 1.0 / static_cast<double>(k)
            : static_cast<double>(stats.counts()[c]) / static_cast<double>(total);
  }
  return LdaModel(std::move(classes), std::vector<std::size_t>(selected.begin(), selected.end()),
                  std::move(means), std::move(covariance), std::move(priors));
}

LdaModel fit_lda(const Eigen::MatrixXd& samples, std::span<const int> labels,
                 std::vector<std::string> classes, std::span<const std::size_t> selected,
                 const LdaConfig& config) {
  Eigen::MatrixXd sub(samples.rows(), static_cast<Eigen::Index>(selected.size()));
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (selected[i] >= static_cast<std::size_t>(samples.cols())) {
      throw Error(ErrorKind::Validation, "selected feature out of range");
    }
    sub.col(static_cast<Eigen::Index>(i)) = samples.col(static_cast<Eigen::Index>(selected[i]));
  }
  const std::size_t k = classes.size();
  ClassStatistics stats(sub, labels, k);
  std::vector<std::size_t> local(selected.size());
  for (std::size_t i = 0; i < local.size(); ++i) local[i] = i;
  LdaModel local_model = fit_from_statistics(stats, std::move(classes), local, config);
  return LdaModel(local_model.classes(), std::vector<std::size_t>(selected.begin(), selected.end()),
                  local_model.means(), local_model.covariance(), local_model.priors());
}

std::string save_model(const LdaModel& model) {
  nlohmann::ordered_json j;
  j["schema_version"] = kModelSchemaVersion;
  j["classes"] = model.classes();
  j["selected_features"] = model.selected_features();
  auto means = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < model.means().rows(); ++r) {
    std::vector<double> row(model.means().cols());
    for (Eigen::Index c = 0; c < model.means().cols(); ++c) row[static_cast<std::size_t>(c)] = model.means()(r, c);
    means.push_back(row);
  }
  j["means"] = means;
  auto cov = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < model.covariance().rows(); ++r) {
    std::vector<double> row(model.covariance().cols());
    for (Eigen::Index c = 0; c < model.covariance().cols(); ++c) row[static_cast<std::size_t>(c)] = model.covariance()(r, c);
    cov.push_back(row);
  }
  j["covariance"] = cov;
  j["priors"] = std::vector<double>(model.priors().data(), model.priors().data() + model.priors().size());
  j["feature_config_digest"] = model.feature_config_digest();
  return j.dump(2) + "\n";
}

LdaModel load_model(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kModelSchemaVersion) {
      throw Error(ErrorKind::SchemaMismatch, "model schema_version " + std::to_string(version) +
                                                 " is not supported (expected " +
                                                 std::to_string(kModelSchemaVersion) + ")");
    }
    auto classes = j.at("classes").get<std::vector<std::string>>();
    auto selected = j.at("selected_features").get<std::vector<std::size_t>>();
    auto means_rows = j.at("means").get<std::vector<std::vector<double>>>();
    auto cov_rows = j.at("covariance").get<std::vector<std::vector<double>>>();
    auto priors_vec = j.at("priors").get<std::vector<double>>();
    auto digest = j.at("feature_config_digest").get<std::string>();

    auto to_matrix = [](const std::vector<std::vector<double>>& rows, std::size_t cols) {
      Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw Error(ErrorKind::Validation, "LDA model: ragged matrix");
        for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
      }
      return m;
    };
    Eigen::VectorXd priors = Eigen::Map<Eigen::VectorXd>(priors_vec.data(), static_cast<Eigen::Index>(priors_vec.size()));
    return LdaModel(std::move(classes), selected, to_matrix(means_rows, selected.size()),
                    to_matrix(cov_rows, selected.size()), std::move(priors), std::move(digest));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("model file is malformed: ") + e.what());
  }
}

}  // namespace snore
