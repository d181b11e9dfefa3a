#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "gist/image.hpp"

namespace testing {

inline gist::Tensor random_image(int c, int h, int w, std::uint64_t seed, double lo = 0.0,
                                 double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  gist::Tensor t(c, h, w);
  for (double& v : t.values()) v = u(rng);
  return t;
}

// Smooth colored test pattern with some edges; values stay inside [0, 1].
inline gist::Tensor pattern_image(int c, int h, int w, double phase) {
  gist::Tensor t(c, h, w);
  for (int ch = 0; ch < c; ++ch)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double u = static_cast<double>(x) / w;
        const double v = static_cast<double>(y) / h;
        double s = 0.5 + 0.25 * std::sin(6.0 * u + phase + ch) * std::cos(4.0 * v - phase);
        if ((x / 8 + y / 8 + ch) % 5 == 0) s += 0.2;
        t.at(ch, y, x) = std::clamp(s, 0.0, 1.0);
      }
  return t;
}

inline std::filesystem::path data_dir() { return GIST_TEST_DATA; }

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("gist_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline double energy(const gist::Tensor& t) {
  double s = 0.0;
  for (double v : t.values()) s += v * v;
  return s;
}

}  // namespace testing
