#pragma once

#include <cstdint>
#include <vector>

#include "gist/image.hpp"

namespace gist {

// Per-pixel tangent directions (unit or zero) and normalized gradient magnitude.
struct EtfField {
  int width = 0;
  int height = 0;
  std::vector<double> vectors;     // interleaved (tx, ty), row-major
  std::vector<double> magnitudes;  // in [0, 1]

  double tx(int y, int x) const { return vectors[2 * (static_cast<std::size_t>(y) * width + x)]; }
  double ty(int y, int x) const {
    return vectors[2 * (static_cast<std::size_t>(y) * width + x) + 1];
  }
  double magnitude(int y, int x) const { return magnitudes[static_cast<std::size_t>(y) * width + x]; }
};

struct EtfParams {
  int radius = 5;
  int iterations = 3;
};

// Sobel gradient (clamped borders) rotated by 90 degrees and normalized.
EtfField init_etf(const Tensor& gray);

// One smoothing pass over the disk of radius params.radius.
EtfField refine_etf(const EtfField& field, const EtfParams& params);

// init_etf followed by params.iterations refinement passes.
EtfField compute_etf(const Tensor& gray, const EtfParams& params);

// Renders the field as a one-channel image: the normalized gradient magnitude.
Tensor etf_to_grayscale(const EtfField& field);

// Element-wise maximum. A one-channel `etf_band` is broadcast over the
// channels of `content`.
Tensor fuse_details(const Tensor& content, const Tensor& etf_band);

// Square crop with side uniform in [min(w, h) / 2, min(w, h)], uniform position.
Rect random_crop_rect(int width, int height, std::uint64_t seed);

// Crop of the style resized to (width, height), converted to grayscale, and
// rendered through the edge tangent flow.
Tensor style_etf_image(const Tensor& style, int width, int height, std::uint64_t seed,
                       const EtfParams& params);

}  // namespace gist
