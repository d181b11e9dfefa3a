#pragma once

// Data-parallel inner loops shared by the transforms, the transport step and
// the edge flow. Every kernel exists twice: `serial` is the direct reference
// formulation kept for testing and benchmarking, `omp` is the OpenMP version
// the library calls. The OpenMP kernels compute every output element from a
// fixed expression (or reduce over fixed-size chunks), so results do not
// depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gist::kernels {

struct PlaneShape {
  int height = 0;
  int width = 0;
  std::size_t size() const { return static_cast<std::size_t>(height) * width; }
};

enum class Axis { x, y };

// Periodic strided correlation along one axis of a plane:
//   out[i] = sum_k taps[k] * in[(step * i + dilation * k + offset) mod N]
// where N is the input length along `axis`; the output length is N / step.
struct AxisFilter {
  std::span<const double> taps;
  int step = 1;
  int dilation = 1;
  Axis axis = Axis::x;
  int offset = 0;
};

// Moments of C-channel datapoints (one per spatial position).
struct Moments {
  std::size_t count = 0;
  std::vector<double> sum;     // C
  std::vector<double> sum_sq;  // C x C row-major, sum of x x^T
};

// A lifting update over one coset of positions:
//   data[p] = self * data[p] + gain * sum_t weights[t] * data[p + offsets[t]]   (periodic)
// The neighbors must lie outside `targets` so the update can run in place.
struct LiftingStep {
  std::span<const std::int32_t> targets;  // flat indices into the plane
  std::span<const int> offset_y;
  std::span<const int> offset_x;
  std::span<const double> weights;
  double self = 1.0;
  double gain = 1.0;
};

// One pass of the edge-tangent-flow smoothing. Vectors are interleaved (tx, ty).
struct EtfPass {
  PlaneShape shape;
  int radius = 5;
  std::span<const double> tangent;    // 2 * size
  std::span<const double> magnitude;  // size
  std::span<double> out;              // 2 * size
};

namespace serial {
void correlate(std::span<const double> in, PlaneShape shape, const AxisFilter& f,
               std::span<double> out);
void correlate_adjoint_add(std::span<const double> in, PlaneShape out_shape, const AxisFilter& f,
                           double scale, std::span<double> out);
Moments moments(std::span<const double* const> planes, std::size_t n,
                std::span<const std::uint32_t> labels, std::uint32_t label, bool use_mask);
void affine(std::span<double* const> planes, std::size_t n, std::span<const double> matrix,
            std::span<const double> source_mean, std::span<const double> target_mean,
            std::span<const std::uint32_t> labels, std::uint32_t label, bool use_mask);
void lift(std::span<double> data, PlaneShape shape, const LiftingStep& step);
void etf_refine(const EtfPass& pass);
}  // namespace serial

namespace omp {
void correlate(std::span<const double> in, PlaneShape shape, const AxisFilter& f,
               std::span<double> out);
void correlate_adjoint_add(std::span<const double> in, PlaneShape out_shape, const AxisFilter& f,
                           double scale, std::span<double> out);
Moments moments(std::span<const double* const> planes, std::size_t n,
                std::span<const std::uint32_t> labels, std::uint32_t label, bool use_mask);
void affine(std::span<double* const> planes, std::size_t n, std::span<const double> matrix,
            std::span<const double> source_mean, std::span<const double> target_mean,
            std::span<const std::uint32_t> labels, std::uint32_t label, bool use_mask);
void lift(std::span<double> data, PlaneShape shape, const LiftingStep& step);
void etf_refine(const EtfPass& pass);
}  // namespace omp

}  // namespace gist::kernels
