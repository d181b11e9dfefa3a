#include "gist/image.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "gist/errors.hpp"

namespace gist {

Tensor::Tensor(int channels, int height, int width, double fill)
    : channels_(channels), height_(height), width_(width) {
  if (channels < 1 || height < 1 || width < 1) {
    throw ArgumentError("tensor dimensions must be positive, got " + std::to_string(channels) +
                        "x" + std::to_string(height) + "x" + std::to_string(width));
  }
  data_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor& Tensor::operator+=(const Tensor& other) {
  if (!same_shape(other)) throw ArgumentError("tensor shape mismatch in +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator*(double s, Tensor a) { return a *= s; }

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) throw ArgumentError("tensor shape mismatch in max_abs_diff");
  double m = 0.0;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) m = std::max(m, std::abs(va[i] - vb[i]));
  return m;
}

std::vector<std::uint32_t> LabelMap::distinct() const {
  std::set<std::uint32_t> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

namespace {

struct Tap {
  int i0;
  int i1;
  double w1;  // weight of i1; i0 gets 1 - w1
};

std::vector<Tap> bilinear_taps(int in, int out) {
  std::vector<Tap> taps(out);
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    double src = (o + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    int i0 = static_cast<int>(std::floor(src));
    int i1 = std::min(i0 + 1, in - 1);
    taps[o] = {i0, i1, src - i0};
  }
  return taps;
}

}  // namespace

Tensor resize_bilinear(const Tensor& img, int width, int height) {
  if (width < 1 || height < 1) throw ArgumentError("resize target dimensions must be >= 1");
  if (width == img.width() && height == img.height()) return img;
  const auto xt = bilinear_taps(img.width(), width);
  const auto yt = bilinear_taps(img.height(), height);
  Tensor out(img.channels(), height, width);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < height; ++y) {
      const Tap& ty = yt[y];
      for (int x = 0; x < width; ++x) {
        const Tap& tx = xt[x];
        double top = (1.0 - tx.w1) * img.at(c, ty.i0, tx.i0) + tx.w1 * img.at(c, ty.i0, tx.i1);
        double bot = (1.0 - tx.w1) * img.at(c, ty.i1, tx.i0) + tx.w1 * img.at(c, ty.i1, tx.i1);
        out.at(c, y, x) = (1.0 - ty.w1) * top + ty.w1 * bot;
      }
    }
  }
  return out;
}

Tensor to_grayscale(const Tensor& img) {
  if (img.channels() == 1) return img;
  if (img.channels() != 3) {
    throw ArgumentError("to_grayscale expects 1 or 3 channels, got " +
                        std::to_string(img.channels()));
  }
  Tensor out(1, img.height(), img.width());
  auto r = img.plane(0);
  auto g = img.plane(1);
  auto b = img.plane(2);
  auto o = out.plane(0);
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  return out;
}

Tensor crop(const Tensor& img, const Rect& r) {
  if (r.w < 1 || r.h < 1 || r.x0 < 0 || r.y0 < 0 || r.x0 + r.w > img.width() ||
      r.y0 + r.h > img.height()) {
    throw ArgumentError("crop rect out of bounds");
  }
  Tensor out(img.channels(), r.h, r.w);
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < r.h; ++y)
      for (int x = 0; x < r.w; ++x) out.at(c, y, x) = img.at(c, r.y0 + y, r.x0 + x);
  return out;
}

Tensor to_rgb(const Tensor& img) {
  if (img.channels() == 3) return img;
  if (img.channels() != 1) {
    throw ArgumentError("to_rgb expects 1 or 3 channels, got " + std::to_string(img.channels()));
  }
  Tensor out(3, img.height(), img.width());
  for (int c = 0; c < 3; ++c) std::copy(img.plane(0).begin(), img.plane(0).end(), out.plane(c).begin());
  return out;
}

LabelMap downsample_nearest(const LabelMap& mask, int factor) {
  if (factor < 1 || mask.width % factor != 0 || mask.height % factor != 0) {
    throw ArgumentError("mask dimensions not divisible by downsampling factor");
  }
  LabelMap out(mask.width / factor, mask.height / factor);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) out.at(y, x) = mask.at(y * factor, x * factor);
  return out;
}

LabelMap resize_nearest(const LabelMap& mask, int width, int height) {
  if (width < 1 || height < 1) throw ArgumentError("resize target dimensions must be >= 1");
  LabelMap out(width, height);
  for (int y = 0; y < height; ++y) {
    int sy = std::min(mask.height - 1, static_cast<int>((y + 0.5) * mask.height / height));
    for (int x = 0; x < width; ++x) {
      int sx = std::min(mask.width - 1, static_cast<int>((x + 0.5) * mask.width / width));
      out.at(y, x) = mask.at(sy, sx);
    }
  }
  return out;
}

}  // namespace gist
