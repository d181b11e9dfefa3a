#include "gist/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gist/errors.hpp"
#include "gist/kernels.hpp"

namespace gist {

namespace {

using kernels::Axis;
using kernels::AxisFilter;
using kernels::PlaneShape;

std::vector<double> quadrature_mirror(const std::vector<double>& h0) {
  const std::size_t n = h0.size();
  std::vector<double> h1(n);
  for (std::size_t k = 0; k < n; ++k) h1[k] = ((k % 2) ? -1.0 : 1.0) * h0[n - 1 - k];
  return h1;
}

std::vector<double> reversed(std::vector<double> v) {
  std::reverse(v.begin(), v.end());
  return v;
}

// Separable two-axis analysis of every channel: x-axis filter first, then y.
// Output order (a, v, h, d): v is low along y / high along x.
SubbandStack analyze_separable(const Tensor& in, const WaveletSpec& spec, int step, int dilation) {
  const int oh = in.height() / step;
  const int ow = in.width() / step;
  SubbandStack s;
  s.approx = Tensor(in.channels(), oh, ow);
  s.details = {Tensor(in.channels(), oh, ow), Tensor(in.channels(), oh, ow),
               Tensor(in.channels(), oh, ow)};
  const PlaneShape full{in.height(), in.width()};
  const PlaneShape half_x{in.height(), ow};
  std::vector<double> lo(half_x.size());
  std::vector<double> hi(half_x.size());
  for (int c = 0; c < in.channels(); ++c) {
    kernels::omp::correlate(in.plane(c), full, {spec.h0, step, dilation, Axis::x}, lo);
    kernels::omp::correlate(in.plane(c), full, {spec.h1, step, dilation, Axis::x}, hi);
    kernels::omp::correlate(lo, half_x, {spec.h0, step, dilation, Axis::y}, s.approx.plane(c));
    kernels::omp::correlate(hi, half_x, {spec.h0, step, dilation, Axis::y}, s.details[0].plane(c));
    kernels::omp::correlate(lo, half_x, {spec.h1, step, dilation, Axis::y}, s.details[1].plane(c));
    kernels::omp::correlate(hi, half_x, {spec.h1, step, dilation, Axis::y}, s.details[2].plane(c));
  }
  return s;
}

// Adjoint of analyze_separable, scaled by `scale` per axis.
Tensor synthesize_separable(const SubbandStack& s, const WaveletSpec& spec, int step, int dilation,
                            double scale) {
  if (!s.has_approx() || s.details.size() != 3) {
    throw StructureError("wavelet synthesis needs an approximation and three details");
  }
  for (const Tensor& d : s.details) {
    if (!d.same_shape(s.approx)) throw ArgumentError("wavelet subband dimensions differ");
  }
  const int channels = s.approx.channels();
  const int oh = s.approx.height() * step;
  const int ow = s.approx.width() * step;
  const PlaneShape full{oh, ow};
  const PlaneShape half_x{oh, s.approx.width()};
  Tensor out(channels, oh, ow);
  std::vector<double> lo(half_x.size());
  std::vector<double> hi(half_x.size());
  for (int c = 0; c < channels; ++c) {
    std::fill(lo.begin(), lo.end(), 0.0);
    std::fill(hi.begin(), hi.end(), 0.0);
    kernels::omp::correlate_adjoint_add(s.approx.plane(c), half_x,
                                        {spec.h0, step, dilation, Axis::y}, scale, lo);
    kernels::omp::correlate_adjoint_add(s.details[1].plane(c), half_x,
                                        {spec.h1, step, dilation, Axis::y}, scale, lo);
    kernels::omp::correlate_adjoint_add(s.details[0].plane(c), half_x,
                                        {spec.h0, step, dilation, Axis::y}, scale, hi);
    kernels::omp::correlate_adjoint_add(s.details[2].plane(c), half_x,
                                        {spec.h1, step, dilation, Axis::y}, scale, hi);
    kernels::omp::correlate_adjoint_add(lo, full, {spec.h0, step, dilation, Axis::x}, scale,
                                        out.plane(c));
    kernels::omp::correlate_adjoint_add(hi, full, {spec.h1, step, dilation, Axis::x}, scale,
                                        out.plane(c));
  }
  return out;
}

}  // namespace

WaveletSpec make_filters(const std::string& family) {
  WaveletSpec spec;
  spec.family = family;
  if (family == "haar" || family == "db1") {
    const double r = 1.0 / std::sqrt(2.0);
    spec.h0 = {r, r};
  } else if (family == "db2") {
    const double s3 = std::sqrt(3.0);
    const double d = 4.0 * std::sqrt(2.0);
    spec.h0 = {(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d};
  } else {
    throw ArgumentError("unknown wavelet family '" + family + "' (expected haar or db2)");
  }
  spec.h1 = quadrature_mirror(spec.h0);
  spec.g0 = reversed(spec.h0);
  spec.g1 = reversed(spec.h1);
  return spec;
}

SubbandStack dwt_analyze_level(const Tensor& approx, const WaveletSpec& spec) {
  if (approx.height() % 2 != 0 || approx.width() % 2 != 0) {
    throw ArgumentError("DWT needs even dimensions, got " + std::to_string(approx.width()) + "x" +
                        std::to_string(approx.height()) + "; pad or resize the input");
  }
  return analyze_separable(approx, spec, 2, 1);
}

Tensor dwt_synthesize_level(const SubbandStack& stack, const WaveletSpec& spec) {
  return synthesize_separable(stack, spec, 2, 1, 1.0);
}

SubbandStack swt_analyze_level(const Tensor& approx, const WaveletSpec& spec, int level) {
  if (level < 1) throw ArgumentError("SWT level must be >= 1");
  const int period = 1 << level;
  if (approx.height() % period != 0 || approx.width() % period != 0) {
    throw ArgumentError("SWT level " + std::to_string(level) + " needs dimensions divisible by " +
                        std::to_string(period));
  }
  return analyze_separable(approx, spec, 1, 1 << (level - 1));
}

// Averaging the even/odd phase reconstructions per axis equals half the
// adjoint of the undecimated analysis along each axis.
Tensor swt_synthesize_level(const SubbandStack& stack, const WaveletSpec& spec, int level) {
  if (level < 1) throw ArgumentError("SWT level must be >= 1");
  return synthesize_separable(stack, spec, 1, 1 << (level - 1), 0.5);
}

WaveletTransform::WaveletTransform(const TransformSpec& spec)
    : spec_(spec), filters_(make_filters(spec.wavelet)) {
  if (spec.kind == TransformKind::contourlet) {
    throw ArgumentError("WaveletTransform cannot realize a contourlet spec");
  }
  if (spec.levels < 1) throw ArgumentError("levels must be >= 1");
  filters_.decimated = spec.kind == TransformKind::dwt;
  filters_.levels = spec.levels;
}

void WaveletTransform::check_dims(int height, int width) const {
  const int period = 1 << spec_.levels;
  if (height % period != 0 || width % period != 0) {
    throw ArgumentError(to_string(spec_.kind) + " with " + std::to_string(spec_.levels) +
                        " levels needs dimensions divisible by " + std::to_string(period) +
                        ", got " + std::to_string(width) + "x" + std::to_string(height));
  }
}

SubbandStack WaveletTransform::analyze_level(const Tensor& approx, int level) const {
  SubbandStack s = filters_.decimated ? dwt_analyze_level(approx, filters_)
                                      : swt_analyze_level(approx, filters_, level);
  s.scale = level;
  return s;
}

Tensor WaveletTransform::synthesize_level(const SubbandStack& stack, int level) const {
  return filters_.decimated ? dwt_synthesize_level(stack, filters_)
                            : swt_synthesize_level(stack, filters_, level);
}

std::vector<LabelMap> WaveletTransform::level_masks(const LabelMap& parent, int /*level*/) const {
  LabelMap m = filters_.decimated ? downsample_nearest(parent, 2) : parent;
  return std::vector<LabelMap>(4, m);
}

}  // namespace gist
