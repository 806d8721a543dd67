#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "snorelda/audio_io.hpp"

namespace testing {

inline constexpr double kPi = 3.14159265358979323846;

inline std::filesystem::path golden(const std::string& name) {
  return std::filesystem::path(SNORE_GOLDEN_DIR) / name;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::path(SNORE_SCRATCH_DIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<double> sine(std::size_t n, double hz, double amp = 1.0, double phase = 0.0,
                                double rate = 16000.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * kPi * hz * i / rate + phase);
  return x;
}

inline std::vector<double> white(std::size_t n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

inline snore::Recording recording(const std::vector<double>& x, std::string patient = "P") {
  snore::Recording r;
  r.patient_id = std::move(patient);
  r.samples.assign(x.begin(), x.end());
  return r;
}

inline snore::AnalysisWindow window(const std::vector<double>& x) {
  snore::AnalysisWindow w;
  w.patient_id = "P";
  w.samples = x;
  return w;
}

inline double energy(const std::vector<float>& x) {
  double e = 0.0;
  for (float v : x) e += static_cast<double>(v) * v;
  return e;
}

}  // namespace testing
