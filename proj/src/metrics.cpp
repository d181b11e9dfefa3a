#include "gist/metrics.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "gist/errors.hpp"

namespace gist {

namespace {

constexpr int kRadius = 5;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> gaussian() {
  std::vector<double> g(2 * kRadius + 1);
  for (int i = -kRadius; i <= kRadius; ++i) g[i + kRadius] = std::exp(-(i * i) / (2.0 * kSigma * kSigma));
  return g;
}

// Separable truncated-and-renormalized Gaussian average of one plane.
std::vector<double> blur(const std::vector<double>& in, int h, int w, const std::vector<double>& g) {
  std::vector<double> tmp(in.size());
  std::vector<double> out(in.size());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      double norm = 0.0;
      for (int k = -kRadius; k <= kRadius; ++k) {
        const int xx = x + k;
        if (xx < 0 || xx >= w) continue;
        acc += g[k + kRadius] * in[static_cast<std::size_t>(y) * w + xx];
        norm += g[k + kRadius];
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc / norm;
    }
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      double norm = 0.0;
      for (int k = -kRadius; k <= kRadius; ++k) {
        const int yy = y + k;
        if (yy < 0 || yy >= h) continue;
        acc += g[k + kRadius] * tmp[static_cast<std::size_t>(yy) * w + x];
        norm += g[k + kRadius];
      }
      out[static_cast<std::size_t>(y) * w + x] = acc / norm;
    }
  return out;
}

void check_pair(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw ArgumentError("SSIM inputs differ in shape: " + std::to_string(a.channels()) + "x" +
                        std::to_string(a.height()) + "x" + std::to_string(a.width()) + " vs " +
                        std::to_string(b.channels()) + "x" + std::to_string(b.height()) + "x" +
                        std::to_string(b.width()));
  }
  if (a.empty()) throw ArgumentError("SSIM of empty images");
}

}  // namespace

Tensor ssim_map(const Tensor& a, const Tensor& b, int channel) {
  check_pair(a, b);
  if (channel < 0 || channel >= a.channels()) throw ArgumentError("SSIM channel out of range");
  const int h = a.height();
  const int w = a.width();
  const std::size_t n = a.plane_size();
  const auto g = gaussian();
  const auto pa = a.plane(channel);
  const auto pb = b.plane(channel);
  std::vector<double> va(pa.begin(), pa.end());
  std::vector<double> vb(pb.begin(), pb.end());
  std::vector<double> aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = va[i] * va[i];
    bb[i] = vb[i] * vb[i];
    ab[i] = va[i] * vb[i];
  }
  const auto mu_a = blur(va, h, w, g);
  const auto mu_b = blur(vb, h, w, g);
  const auto e_aa = blur(aa, h, w, g);
  const auto e_bb = blur(bb, h, w, g);
  const auto e_ab = blur(ab, h, w, g);
  Tensor out(1, h, w);
  auto o = out.plane(0);
  for (std::size_t i = 0; i < n; ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double saa = e_aa[i] - ma * ma;
    const double sbb = e_bb[i] - mb * mb;
    const double sab = e_ab[i] - ma * mb;
    o[i] = ((2.0 * ma * mb + kC1) * (2.0 * sab + kC2)) / ((ma * ma + mb * mb + kC1) * (saa + sbb + kC2));
  }
  return out;
}

double ssim(const Tensor& a, const Tensor& b) {
  check_pair(a, b);
  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    const Tensor m = ssim_map(a, b, c);
    double s = 0.0;
    for (double v : m.values()) s += v;
    total += s / static_cast<double>(m.size());
  }
  return total / a.channels();
}

}  // namespace gist
