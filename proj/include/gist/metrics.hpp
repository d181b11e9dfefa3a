#pragma once

#include "gist/image.hpp"

namespace gist {

// Mean SSIM over all pixels and channels: 11x11 Gaussian window (sigma 1.5),
// K1 = 0.01, K2 = 0.03, dynamic range 1. Near the borders the window is
// truncated to the image and renormalized.
double ssim(const Tensor& a, const Tensor& b);

// Per-pixel SSIM of one channel, for inspection.
Tensor ssim_map(const Tensor& a, const Tensor& b, int channel);

}  // namespace gist
