#include "gist/etf.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "gist/errors.hpp"
#include "gist/kernels.hpp"

namespace gist {

namespace {

void check_field(const EtfField& f) {
  const std::size_t n = static_cast<std::size_t>(f.width) * f.height;
  if (f.vectors.size() != 2 * n || f.magnitudes.size() != n) {
    throw ArgumentError("edge flow field storage does not match its dimensions");
  }
}

}  // namespace

EtfField init_etf(const Tensor& gray) {
  if (gray.channels() != 1) {
    throw ArgumentError("edge flow needs a single-channel image, got " +
                        std::to_string(gray.channels()) + " channels");
  }
  const int h = gray.height();
  const int w = gray.width();
  EtfField f;
  f.width = w;
  f.height = h;
  f.vectors.assign(2 * static_cast<std::size_t>(w) * h, 0.0);
  f.magnitudes.assign(static_cast<std::size_t>(w) * h, 0.0);

  auto px = [&](int y, int x) {
    return gray.at(0, std::clamp(y, 0, h - 1), std::clamp(x, 0, w - 1));
  };
  double top = 0.0;
#pragma omp parallel for schedule(static) reduction(max : top)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (px(y - 1, x + 1) + 2.0 * px(y, x + 1) + px(y + 1, x + 1)) -
                        (px(y - 1, x - 1) + 2.0 * px(y, x - 1) + px(y + 1, x - 1));
      const double gy = (px(y + 1, x - 1) + 2.0 * px(y + 1, x) + px(y + 1, x + 1)) -
                        (px(y - 1, x - 1) + 2.0 * px(y - 1, x) + px(y - 1, x + 1));
      const double mag = std::hypot(gx, gy);
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      f.magnitudes[p] = mag;
      if (mag >= 1e-8) {
        f.vectors[2 * p] = -gy / mag;
        f.vectors[2 * p + 1] = gx / mag;
      }
      top = std::max(top, mag);
    }
  }
  if (top > 0.0) {
    for (double& m : f.magnitudes) m /= top;
  }
  return f;
}

EtfField refine_etf(const EtfField& field, const EtfParams& params) {
  if (params.radius < 1) throw ArgumentError("edge flow radius must be >= 1");
  check_field(field);
  EtfField out = field;
  kernels::omp::etf_refine({{field.height, field.width}, params.radius, field.vectors,
                            field.magnitudes, out.vectors});
  return out;
}

EtfField compute_etf(const Tensor& gray, const EtfParams& params) {
  if (params.iterations < 1) throw ArgumentError("edge flow iterations must be >= 1");
  EtfField f = init_etf(gray);
  for (int i = 0; i < params.iterations; ++i) f = refine_etf(f, params);
  return f;
}

Tensor etf_to_grayscale(const EtfField& field) {
  check_field(field);
  Tensor out(1, field.height, field.width);
  std::copy(field.magnitudes.begin(), field.magnitudes.end(), out.plane(0).begin());
  return out;
}

Tensor fuse_details(const Tensor& content, const Tensor& etf_band) {
  const bool broadcast = etf_band.channels() == 1;
  if (content.height() != etf_band.height() || content.width() != etf_band.width() ||
      (!broadcast && etf_band.channels() != content.channels())) {
    throw ArgumentError("fused subbands differ in shape");
  }
  Tensor out = content;
  for (int c = 0; c < out.channels(); ++c) {
    auto dst = out.plane(c);
    auto src = etf_band.plane(broadcast ? 0 : c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::max(dst[i], src[i]);
  }
  return out;
}

Rect random_crop_rect(int width, int height, std::uint64_t seed) {
  if (width < 1 || height < 1) throw ArgumentError("cannot crop an empty image");
  std::mt19937_64 rng(seed);
  const int m = std::min(width, height);
  const int side = std::uniform_int_distribution<int>(std::max(1, m / 2), m)(rng);
  Rect r;
  r.w = side;
  r.h = side;
  r.x0 = std::uniform_int_distribution<int>(0, width - side)(rng);
  r.y0 = std::uniform_int_distribution<int>(0, height - side)(rng);
  return r;
}

Tensor style_etf_image(const Tensor& style, int width, int height, std::uint64_t seed,
                       const EtfParams& params) {
  const Rect r = random_crop_rect(style.width(), style.height(), seed);
  const Tensor patch = resize_bilinear(to_grayscale(crop(style, r)), width, height);
  return etf_to_grayscale(compute_etf(patch, params));
}

}  // namespace gist
