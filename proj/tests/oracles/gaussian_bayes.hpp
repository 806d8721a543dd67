#pragma once

// Gaussian Bayes classifier evaluated from the full multivariate normal
// density. Pooled covariance, its inverse and log-determinant come from a
// hand-written Gauss-Jordan elimination; no linear algebra library is used.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

struct GaussianBayes {
  std::vector<Vec> means;
  Mat inverse;
  double log_det = 0.0;
  Vec log_priors;

  static GaussianBayes fit(const std::vector<Vec>& x, const std::vector<int>& y, int classes,
                           const Vec* priors = nullptr, double ridge = 0.0) {
    const std::size_t d = x.front().size();
    GaussianBayes g;
    g.means.assign(classes, Vec(d, 0.0));
    std::vector<double> counts(classes, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      counts[y[i]] += 1.0;
      for (std::size_t j = 0; j < d; ++j) g.means[y[i]][j] += x[i][j];
    }
    for (int k = 0; k < classes; ++k)
      for (double& v : g.means[k]) v /= counts[k];

    Mat cov(d, Vec(d, 0.0));
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
          cov[a][b] += (x[i][a] - g.means[y[i]][a]) * (x[i][b] - g.means[y[i]][b]);
    for (auto& row : cov)
      for (double& v : row) v /= static_cast<double>(x.size() - classes);
    // Optional diagonal loading, ridge * mean variance.
    double mean_var = 0.0;
    for (std::size_t a = 0; a < d; ++a) mean_var += cov[a][a] / static_cast<double>(d);
    for (std::size_t a = 0; a < d; ++a) cov[a][a] += ridge * mean_var;

    invert(cov, g.inverse, g.log_det);
    for (int k = 0; k < classes; ++k) {
      const double p = priors ? (*priors)[k] : counts[k] / static_cast<double>(x.size());
      g.log_priors.push_back(std::log(p));
    }
    return g;
  }

  static void invert(Mat a, Mat& inv, double& log_det) {
    const std::size_t n = a.size();
    inv.assign(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    log_det = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < n; ++r)
        if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
      if (a[piv][c] == 0.0) throw std::runtime_error("singular covariance");
      std::swap(a[c], a[piv]);
      std::swap(inv[c], inv[piv]);
      const double p = a[c][c];
      log_det += std::log(std::fabs(p));
      for (std::size_t j = 0; j < n; ++j) {
        a[c][j] /= p;
        inv[c][j] /= p;
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c) continue;
        const double f = a[r][c];
        if (f == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
          a[r][j] -= f * a[c][j];
          inv[r][j] -= f * inv[c][j];
        }
      }
    }
  }

  /// log( prior_k * N(x; mu_k, Sigma) ) for every class.
  Vec log_joint(const Vec& x) const {
    const double pi = std::acos(-1.0);
    const std::size_t d = x.size();
    Vec out;
    for (std::size_t k = 0; k < means.size(); ++k) {
      Vec diff(d);
      for (std::size_t j = 0; j < d; ++j) diff[j] = x[j] - means[k][j];
      double q = 0.0;
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) q += diff[a] * inverse[a][b] * diff[b];
      out.push_back(log_priors[k] - 0.5 * (d * std::log(2.0 * pi) + log_det + q));
    }
    return out;
  }

  int predict(const Vec& x) const {
    const Vec l = log_joint(x);
    int best = 0;
    for (std::size_t k = 1; k < l.size(); ++k)
      if (l[k] > l[best]) best = static_cast<int>(k);
    return best;
  }
};

}  // namespace oracle
