#include "snorelda/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "snorelda/error.hpp"
#include "snorelda/random.hpp"

namespace snore {
namespace {

Rate ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(cells_.begin(), cells_.end(), std::uint64_t{0});
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (k_ == 0) {
    *this = other;
    return *this;
  }
  if (other.k_ != k_) throw Error(ErrorKind::Validation, "confusion matrix size mismatch");
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
  return *this;
}

MetricSet compute_metrics(const ConfusionMatrix& confusion, std::optional<std::size_t> positive_class) {
  const std::size_t k = confusion.classes();
  const std::uint64_t total = confusion.total();
  if (k == 0 || total == 0) throw Error(ErrorKind::Validation, "confusion matrix is empty");

  MetricSet m;
  std::uint64_t correct = 0;
  for (std::size_t c = 0; c < k; ++c) correct += confusion.at(c, c);
  m.accuracy = ratio(correct, total);

  m.per_class.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::uint64_t row = 0;
    std::uint64_t col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += confusion.at(c, j);
      col += confusion.at(j, c);
    }
    m.per_class[c].sensitivity = ratio(confusion.at(c, c), row);
    m.per_class[c].ppv = ratio(confusion.at(c, c), col);
  }

  if (k == 2) {
    const std::size_t pos = positive_class.value_or(0);
    if (pos > 1) throw Error(ErrorKind::Validation, "positive class out of range");
    const std::size_t neg = 1 - pos;
    const std::uint64_t tp = confusion.at(pos, pos);
    const std::uint64_t fn = confusion.at(pos, neg);
    const std::uint64_t fp = confusion.at(neg, pos);
    const std::uint64_t tn = confusion.at(neg, neg);
    BinaryMetrics b;
    b.accuracy = ratio(tp + tn, total);
    b.sensitivity = ratio(tp, tp + fn);
    b.specificity = ratio(tn, tn + fp);
    b.ppv = ratio(tp, tp + fp);
    b.npv = ratio(tn, tn + fn);
    m.binary = b;
  }
  return m;
}

double percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorKind::Validation, "percentile of empty sample");
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::optional<Interval> bootstrap_interval(
    std::size_t groups, const std::function<Rate(std::span<const std::size_t>)>& statistic,
    double level, std::size_t resamples, std::uint64_t seed) {
  if (groups < 3 || resamples == 0) return std::nullopt;
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> draw(groups);
  std::vector<double> values;
  values.reserve(resamples);
  for (std::size_t r = 0; r < resamples; ++r) {
    for (auto& d : draw) d = uniform_below(rng, groups);
    if (auto v = statistic(draw)) values.push_back(*v);
  }
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const double tail = (1.0 - level) / 2.0;
  return Interval{percentile(values, tail), percentile(values, 1.0 - tail)};
}

std::optional<Interval> confidence_interval(std::span<const double> samples, double level,
                                            std::size_t resamples, std::uint64_t seed) {
  return bootstrap_interval(
      samples.size(),
      [&](std::span<const std::size_t> idx) -> Rate {
        double sum = 0.0;
        for (std::size_t i : idx) sum += samples[i];
        return sum / static_cast<double>(idx.size());
      },
      level, resamples, seed);
}

}  // namespace snore
