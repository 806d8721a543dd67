#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace snore {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes) : k_(classes), cells_(classes * classes, 0) {}

  std::size_t classes() const { return k_; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const { return cells_[truth * k_ + predicted]; }
  std::uint64_t& at(std::size_t truth, std::size_t predicted) { return cells_[truth * k_ + predicted]; }
  void add(std::size_t truth, std::size_t predicted) { ++at(truth, predicted); }
  std::uint64_t total() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t k_ = 0;
  std::vector<std::uint64_t> cells_;
};

/// A rate whose denominator was zero is left empty (undefined), never NaN.
using Rate = std::optional<double>;

struct BinaryMetrics {
  Rate accuracy;
  Rate sensitivity;
  Rate specificity;
  Rate ppv;
  Rate npv;
};

struct ClassMetrics {
  Rate sensitivity;
  Rate ppv;
};

struct MetricSet {
  Rate accuracy;
  std::optional<BinaryMetrics> binary;  // two-class matrices only
  std::vector<ClassMetrics> per_class;  // one-vs-rest, every matrix
};

/// For a 2x2 matrix the positive class defaults to 0. Throws Validation on
/// an empty matrix.
MetricSet compute_metrics(const ConfusionMatrix& confusion,
                          std::optional<std::size_t> positive_class = std::nullopt);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Linear interpolation between order statistics; `sorted` must be ascending.
double percentile(std::span<const double> sorted, double q);

/// Percentile bootstrap over groups: `statistic` receives the resampled group
/// indices and may return nothing when undefined for that resample. Returns
/// nothing with fewer than 3 groups or when every resample was undefined.
std::optional<Interval> bootstrap_interval(
    std::size_t groups, const std::function<Rate(std::span<const std::size_t>)>& statistic,
    double level, std::size_t resamples, std::uint64_t seed);

/// Bootstrap interval of the mean of per-patient metric samples.
std::optional<Interval> confidence_interval(std::span<const double> samples, double level = 0.95,
                                            std::size_t resamples = 1000, std::uint64_t seed = 0);

}  // namespace snore
