#pragma once

// Exact bootstrap distribution of the mean of a 0/1 sample: resampling n
// values with replacement from k ones gives Binomial(n, k/n) / n. The
// q-quantile is the smallest atom whose CDF reaches q.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

inline std::vector<double> binomial_cdf(std::size_t n, double p) {
  std::vector<double> cdf(n + 1);
  double acc = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                           (i ? i * std::log(p) : 0.0) + (n - i ? (n - i) * std::log1p(-p) : 0.0);
    acc += std::exp(log_pmf);
    cdf[i] = acc;
  }
  return cdf;
}

struct ExactQuantile {
  double value = 0.0;
  double cdf_below = 0.0;  // CDF just below the atom
  double cdf_at = 0.0;     // CDF at the atom
};

inline ExactQuantile bernoulli_mean_quantile(std::size_t n, std::size_t ones, double q) {
  const auto cdf = binomial_cdf(n, static_cast<double>(ones) / n);
  for (std::size_t i = 0; i <= n; ++i) {
    if (cdf[i] >= q) return {static_cast<double>(i) / n, i ? cdf[i - 1] : 0.0, cdf[i]};
  }
  return {1.0, cdf[n - 1], 1.0};
}

}  // namespace oracle
