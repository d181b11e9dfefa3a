#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace gist {

// Planar real-valued raster: channel-major, each plane row-major height x width.
// Pixel-domain images use the nominal range [0, 1]; subband coefficients reuse
// the same container without a range constraint.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int channels, int height, int width, double fill = 0.0);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t plane_size() const { return static_cast<std::size_t>(height_) * width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  double at(int c, int y, int x) const { return data_[index(c, y, x)]; }

  std::span<double> plane(int c) { return {data_.data() + c * plane_size(), plane_size()}; }
  std::span<const double> plane(int c) const {
    return {data_.data() + c * plane_size(), plane_size()};
  }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const Tensor& other) const {
    return channels_ == other.channels_ && height_ == other.height_ && width_ == other.width_;
  }
  bool all_finite() const;

  Tensor& operator+=(const Tensor& other);
  Tensor& operator*=(double s);

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

using ImageTensor = Tensor;

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator*(double s, Tensor a);
double max_abs_diff(const Tensor& a, const Tensor& b);

// Per-pixel integer labels; 0 is an ordinary label usually meaning "unlabeled".
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> labels;

  LabelMap() = default;
  LabelMap(int w, int h, std::uint32_t fill = 0)
      : width(w), height(h), labels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint32_t at(int y, int x) const { return labels[static_cast<std::size_t>(y) * width + x]; }
  std::uint32_t& at(int y, int x) { return labels[static_cast<std::size_t>(y) * width + x]; }
  std::vector<std::uint32_t> distinct() const;
};

using RegionMask = LabelMap;

struct Rect {
  int x0 = 0;
  int y0 = 0;
  int w = 0;
  int h = 0;
  bool operator==(const Rect&) const = default;
};

// Bilinear with half-pixel centers (align-corners off), clamped at borders.
Tensor resize_bilinear(const Tensor& img, int width, int height);

// BT.601 luma; a single-channel input is returned unchanged.
Tensor to_grayscale(const Tensor& img);

Tensor crop(const Tensor& img, const Rect& r);

// Replicates a single-channel image to three channels; three-channel input is returned as is.
Tensor to_rgb(const Tensor& img);

// Picks the top-left sample of every factor x factor block.
LabelMap downsample_nearest(const LabelMap& mask, int factor);
LabelMap resize_nearest(const LabelMap& mask, int width, int height);

// File I/O. PNG (8-bit gray/RGB, alpha dropped) and binary PPM/PGM (P6/P5).
ImageTensor load_image(const std::filesystem::path& path);
// Writes PNG unless the extension is .ppm/.pgm. Values are clamped then round(v*255).
void save_image(const ImageTensor& img, const std::filesystem::path& path);
LabelMap load_mask(const std::filesystem::path& path);
void save_mask(const LabelMap& mask, const std::filesystem::path& path);

// Min-max normalized dump used for inspecting subbands.
void save_normalized(const Tensor& t, const std::filesystem::path& path);

}  // namespace gist
