// Regenerates the golden files under tests/golden from the oracles.
// Usage: freeze_oracles <golden_dir>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include "bootstrap_exact.hpp"
#include "coverage_label.hpp"
#include "gaussian_bayes.hpp"
#include "mfcc_reference.hpp"
#include "problems.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: freeze_oracles <golden_dir>\n";
    return 2;
  }
  const std::string dir = argv[1];

  {
    std::ofstream out(dir + "/mfcc_1khz_frame.txt");
    std::vector<double> sine(400);
    for (std::size_t n = 0; n < sine.size(); ++n) sine[n] = std::sin(2.0 * std::acos(-1.0) * 1000.0 * n / 16000.0);
    oracle::MfccReference ref;
    out << std::setprecision(17);
    for (double c : ref.frame_mfcc(sine.data())) out << c << "\n";
  }

  for (int classes : {2, 3}) {
    const auto p = oracle::gaussian_problem(1000 + classes, classes, 4, 60, 1000);
    const auto g = oracle::GaussianBayes::fit(p.x, p.y, classes);
    std::ofstream out(dir + "/gaussian_bayes_" + std::to_string(classes) + "class.txt");
    for (const auto& x : p.probes) out << g.predict(x);
    out << "\n";
  }

  {
    std::ofstream out(dir + "/bootstrap_bernoulli_20_14.txt");
    out << std::setprecision(17);
    for (double q : {0.025, 0.975}) {
      const auto e = oracle::bernoulli_mean_quantile(20, 14, q);
      out << q << " " << e.value << " " << e.cdf_below << " " << e.cdf_at << "\n";
    }
  }

  {
    // start end cls ... | window start | expected
    std::ofstream out(dir + "/window_labels.txt");
    const std::vector<std::pair<std::vector<oracle::Interval>, double>> cases = {
        {{{0, 6, 1}}, 0},
        {{{0, 20, 0}}, 10},
        {{{2, 5, 0}, {5, 9, 1}}, 0},
        {{{0, 5, 0}, {5, 10, 1}}, 0},
        {{{1, 4, 0}, {4, 7.5, 1}}, 0},
        {{{8, 13.5, 0}}, 10},
        {{{3, 7, 0}}, 0},
        {{{0, 3.5, 0}, {3.5, 7, 1}, {7, 10, 2}}, 0},
    };
    for (const auto& [events, start] : cases) {
      for (const auto& e : events) out << e.start << " " << e.end << " " << e.cls << " ";
      out << "| " << start << " | " << oracle::sampled_label(events, start, start + 10.0) << "\n";
    }
  }
  std::cout << "golden files written to " << dir << "\n";
  return 0;
}
