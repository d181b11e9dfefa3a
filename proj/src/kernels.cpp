#include "gist/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace gist::kernels {

namespace {

inline int wrap(long v, int n) {
  long r = v % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

inline bool selected(std::span<const std::uint32_t> labels, std::uint32_t label, bool use_mask,
                     std::size_t p) {
  return !use_mask || labels[p] == label;
}

// Positions per chunk of the deterministic moment reduction.
constexpr std::size_t kMomentChunk = 4096;

void accumulate_range(std::span<const double* const> planes, std::size_t begin, std::size_t end,
                      std::span<const std::uint32_t> labels, std::uint32_t label, bool use_mask,
                      Moments& m) {
  const std::size_t c = planes.size();
  std::vector<double> x(c);
  for (std::size_t p = begin; p < end; ++p) {
    if (!selected(labels, label, use_mask, p)) continue;
    for (std::size_t i = 0; i < c; ++i) x[i] = planes[i][p];
    ++m.count;
    for (std::size_t i = 0; i < c; ++i) {
      m.sum[i] += x[i];
      for (std::size_t j = i; j < c; ++j) m.sum_sq[i * c + j] += x[i] * x[j];
    }
  }
}

void symmetrize(Moments& m, std::size_t c) {
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = 0; j < i; ++j) m.sum_sq[i * c + j] = m.sum_sq[j * c + i];
}

Moments empty_moments(std::size_t c) {
  Moments m;
  m.sum.assign(c, 0.0);
  m.sum_sq.assign(c * c, 0.0);
  return m;
}

struct DiskOffset {
  int dy;
  int dx;
};

std::vector<DiskOffset> disk(int radius) {
  std::vector<DiskOffset> d;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy < radius * radius) d.push_back({dy, dx});
  return d;
}

// Smoothed tangent at one pixel; shared by both ETF kernels so they differ only in scheduling.
inline void etf_pixel(const EtfPass& pass, const std::vector<DiskOffset>& offsets, int y, int x) {
  const int w = pass.shape.width;
  const int h = pass.shape.height;
  const std::size_t p = static_cast<std::size_t>(y) * w + x;
  const double ex = pass.tangent[2 * p];
  const double ey = pass.tangent[2 * p + 1];
  double ax = 0.0;
  double ay = 0.0;
  if (ex != 0.0 || ey != 0.0) {
    const double gx = pass.magnitude[p];
    int tau = 0;
    for (const DiskOffset& o : offsets) {
      const int yy = y + o.dy;
      const int xx = x + o.dx;
      if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
      ++tau;
      const std::size_t q = static_cast<std::size_t>(yy) * w + xx;
      const double fx = pass.tangent[2 * q];
      const double fy = pass.tangent[2 * q + 1];
      const double dot = ex * fx + ey * fy;
      const double phi = dot >= 0.0 ? 1.0 : -1.0;
      const double wm = (pass.magnitude[q] - gx + 1.0) * 0.5;
      const double wd = std::abs(dot);
      const double wgt = phi * wm * wd;
      ax += wgt * fx;
      ay += wgt * fy;
    }
    ax /= tau;
    ay /= tau;
    const double norm = std::hypot(ax, ay);
    if (norm > 1e-12) {
      ax /= norm;
      ay /= norm;
    } else {
      ax = ay = 0.0;
    }
  }
  pass.out[2 * p] = ax;
  pass.out[2 * p + 1] = ay;
}

}  // namespace

// ---------------------------------------------------------------------------
// Serial reference kernels
// ---------------------------------------------------------------------------
namespace serial {

void correlate(std::span<const double> in, PlaneShape shape, const AxisFilter& f,
               std::span<double> out) {
  const int taps = static_cast<int>(f.taps.size());
  if (f.axis == Axis::x) {
    const int ow = shape.width / f.step;
    for (int y = 0; y < shape.height; ++y)
      for (int i = 0; i < ow; ++i) {
        double acc = 0.0;
        for (int k = 0; k < taps; ++k)
          acc += f.taps[k] * in[static_cast<std::size_t>(y) * shape.width +
                                wrap(static_cast<long>(f.step) * i + static_cast<long>(f.dilation) * k + f.offset,
                                     shape.width)];
        out[static_cast<std::size_t>(y) * ow + i] = acc;
      }
  } else {
    const int oh = shape.height / f.step;
    for (int i = 0; i < oh; ++i)
      for (int x = 0; x < shape.width; ++x) {
        double acc = 0.0;
        for (int k = 0; k < taps; ++k)
          acc += f.taps[k] *
                 in[static_cast<std::size_t>(wrap(static_cast<long>(f.step) * i +
                                                      static_cast<long>(f.dilation) * k + f.offset,
                                                  shape.height)) *
                        shape.width +
                    x];
        out[static_cast<std::size_t>(i) * shape.width + x] = acc;
      }
  }
}

// Scatter form: every input sample spreads into the output along its filter support.
void correlate_adjoint_add(std::span<const double> in, PlaneShape out_shape, const AxisFilter& f,
                           double scale, std::span<double> out) {
  const int taps = static_cast<int>(f.taps.size());
  if (f.axis == Axis::x) {
    const int iw = out_shape.width / f.step;
    for (int y = 0; y < out_shape.height; ++y)
      for (int i = 0; i < iw; ++i) {
        const double v = scale * in[static_cast<std::size_t>(y) * iw + i];
        for (int k = 0; k < taps; ++k)
          out[static_cast<std::size_t>(y) * out_shape.width +
              wrap(static_cast<long>(f.step) * i + static_cast<long>(f.dilation) * k + f.offset,
                   out_shape.width)] += f.taps[k] * v;
      }
  } else {
    const int ih = out_shape.height / f.step;
    for (int i = 0; i < ih; ++i)
      for (int x = 0; x < out_shape.width; ++x) {
        const double v = scale * in[static_cast<std::size_t>(i) * out_shape.width + x];
        for (int k = 0; k < taps; ++k)
          out[static_cast<std::size_t>(wrap(static_cast<long>(f.step) * i +
                                                static_cast<long>(f.dilation) * k + f.offset,
                                            out_shape.height)) *
                  out_shape.width +
              x] += f.taps[k] * v;
      }
  }
}

Moments moments(std::span<const double* const> planes, std::size_t n,
                std::span<const std::uint32_t> labels, std::uint32_t label, bool use_mask) {
  Moments m = empty_moments(planes.size());
  accumulate_range(planes, 0, n, labels, label, use_mask, m);
  symmetrize(m, planes.size());
  return m;
}

void affine(std::span<double* const> planes, std::size_t n, std::span<const double> matrix,
            std::span<const double> source_mean, std::span<const double> target_mean,
            std::span<const std::uint32_t> labels, std::uint32_t label, bool use_mask) {
  const std::size_t c = planes.size();
  std::vector<double> x(c);
  for (std::size_t p = 0; p < n; ++p) {
    if (!selected(labels, label, use_mask, p)) continue;
    for (std::size_t i = 0; i < c; ++i) x[i] = planes[i][p] - source_mean[i];
    for (std::size_t i = 0; i < c; ++i) {
      double acc = target_mean[i];
      for (std::size_t j = 0; j < c; ++j) acc += matrix[i * c + j] * x[j];
      planes[i][p] = acc;
    }
  }
}

void lift(std::span<double> data, PlaneShape shape, const LiftingStep& step) {
  for (std::int32_t t : step.targets) {
    const int y = t / shape.width;
    const int x = t % shape.width;
    double acc = 0.0;
    for (std::size_t k = 0; k < step.weights.size(); ++k) {
      const int yy = wrap(y + step.offset_y[k], shape.height);
      const int xx = wrap(x + step.offset_x[k], shape.width);
      acc += step.weights[k] * data[static_cast<std::size_t>(yy) * shape.width + xx];
    }
    data[t] = step.self * data[t] + step.gain * acc;
  }
}

void etf_refine(const EtfPass& pass) {
  const auto offsets = disk(pass.radius);
  for (int y = 0; y < pass.shape.height; ++y)
    for (int x = 0; x < pass.shape.width; ++x) etf_pixel(pass, offsets, y, x);
}

}  // namespace serial

// ---------------------------------------------------------------------------
// OpenMP kernels
// ---------------------------------------------------------------------------
namespace omp {

void correlate(std::span<const double> in, PlaneShape shape, const AxisFilter& f,
               std::span<double> out) {
  const int taps = static_cast<int>(f.taps.size());
  const double* src = in.data();
  double* dst = out.data();
  const double* tp = f.taps.data();
  if (f.axis == Axis::x) {
    const int w = shape.width;
    const int ow = w / f.step;
#pragma omp parallel
    {
      std::vector<int> idx(static_cast<std::size_t>(ow) * taps);
      for (int i = 0; i < ow; ++i)
        for (int k = 0; k < taps; ++k)
          idx[static_cast<std::size_t>(i) * taps + k] =
              wrap(static_cast<long>(f.step) * i + static_cast<long>(f.dilation) * k + f.offset, w);
#pragma omp for schedule(static)
      for (int y = 0; y < shape.height; ++y) {
        const double* row = src + static_cast<std::size_t>(y) * w;
        double* orow = dst + static_cast<std::size_t>(y) * ow;
        for (int i = 0; i < ow; ++i) {
          const int* ix = idx.data() + static_cast<std::size_t>(i) * taps;
          double acc = 0.0;
          for (int k = 0; k < taps; ++k) acc += tp[k] * row[ix[k]];
          orow[i] = acc;
        }
      }
    }
  } else {
    const int w = shape.width;
    const int oh = shape.height / f.step;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < oh; ++i) {
      double* orow = dst + static_cast<std::size_t>(i) * w;
      std::fill(orow, orow + w, 0.0);
      for (int k = 0; k < taps; ++k) {
        const int r = wrap(static_cast<long>(f.step) * i + static_cast<long>(f.dilation) * k + f.offset,
                           shape.height);
        const double* row = src + static_cast<std::size_t>(r) * w;
        const double t = tp[k];
        for (int x = 0; x < w; ++x) orow[x] += t * row[x];
      }
    }
  }
}

// Gather form: each output sample collects the taps that land on it.
void correlate_adjoint_add(std::span<const double> in, PlaneShape out_shape, const AxisFilter& f,
                           double scale, std::span<double> out) {
  const int taps = static_cast<int>(f.taps.size());
  const double* src = in.data();
  double* dst = out.data();
  const double* tp = f.taps.data();
  if (f.axis == Axis::x) {
    const int w = out_shape.width;
    const int iw = w / f.step;
#pragma omp parallel
    {
      // For output column m: contributing (input index, tap) pairs, -1 when absent.
      std::vector<int> src_idx(static_cast<std::size_t>(w) * taps);
      for (int m = 0; m < w; ++m)
        for (int k = 0; k < taps; ++k) {
          const int j = wrap(static_cast<long>(m) - static_cast<long>(f.dilation) * k - f.offset, w);
          src_idx[static_cast<std::size_t>(m) * taps + k] = (j % f.step == 0) ? j / f.step : -1;
        }
#pragma omp for schedule(static)
      for (int y = 0; y < out_shape.height; ++y) {
        const double* irow = src + static_cast<std::size_t>(y) * iw;
        double* orow = dst + static_cast<std::size_t>(y) * w;
        for (int m = 0; m < w; ++m) {
          const int* si = src_idx.data() + static_cast<std::size_t>(m) * taps;
          double acc = 0.0;
          for (int k = 0; k < taps; ++k)
            if (si[k] >= 0) acc += tp[k] * irow[si[k]];
          orow[m] += scale * acc;
        }
      }
    }
  } else {
    const int w = out_shape.width;
    const int h = out_shape.height;
#pragma omp parallel for schedule(static)
    for (int m = 0; m < h; ++m) {
      double* orow = dst + static_cast<std::size_t>(m) * w;
      for (int k = 0; k < taps; ++k) {
        const int j = wrap(static_cast<long>(m) - static_cast<long>(f.dilation) * k - f.offset, h);
        if (j % f.step != 0) continue;
        const double* irow = src + static_cast<std::size_t>(j / f.step) * w;
        const double t = scale * tp[k];
        for (int x = 0; x < w; ++x) orow[x] += t * irow[x];
      }
    }
  }
}

Moments moments(std::span<const double* const> planes, std::size_t n,
                std::span<const std::uint32_t> labels, std::uint32_t label, bool use_mask) {
  const std::size_t c = planes.size();
  const std::size_t chunks = (n + kMomentChunk - 1) / kMomentChunk;
  std::vector<Moments> partial(chunks, empty_moments(c));
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < chunks; ++b) {
    accumulate_range(planes, b * kMomentChunk, std::min(n, (b + 1) * kMomentChunk), labels, label,
                     use_mask, partial[b]);
  }
  Moments m = empty_moments(c);
  for (const Moments& p : partial) {
    m.count += p.count;
    for (std::size_t i = 0; i < c; ++i) m.sum[i] += p.sum[i];
    for (std::size_t i = 0; i < c * c; ++i) m.sum_sq[i] += p.sum_sq[i];
  }
  symmetrize(m, c);
  return m;
}

void affine(std::span<double* const> planes, std::size_t n, std::span<const double> matrix,
            std::span<const double> source_mean, std::span<const double> target_mean,
            std::span<const std::uint32_t> labels, std::uint32_t label, bool use_mask) {
  const std::size_t c = planes.size();
  const long total = static_cast<long>(n);
#pragma omp parallel
  {
    std::vector<double> x(c);
#pragma omp for schedule(static)
    for (long p = 0; p < total; ++p) {
      if (!selected(labels, label, use_mask, static_cast<std::size_t>(p))) continue;
      for (std::size_t i = 0; i < c; ++i) x[i] = planes[i][p] - source_mean[i];
      for (std::size_t i = 0; i < c; ++i) {
        double acc = target_mean[i];
        for (std::size_t j = 0; j < c; ++j) acc += matrix[i * c + j] * x[j];
        planes[i][p] = acc;
      }
    }
  }
}

void lift(std::span<double> data, PlaneShape shape, const LiftingStep& step) {
  const long count = static_cast<long>(step.targets.size());
  const std::size_t nw = step.weights.size();
  double* d = data.data();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) {
    const std::int32_t t = step.targets[i];
    const int y = t / shape.width;
    const int x = t % shape.width;
    double acc = 0.0;
    for (std::size_t k = 0; k < nw; ++k) {
      int yy = y + step.offset_y[k];
      int xx = x + step.offset_x[k];
      if (yy < 0 || yy >= shape.height) yy = wrap(yy, shape.height);
      if (xx < 0 || xx >= shape.width) xx = wrap(xx, shape.width);
      acc += step.weights[k] * d[static_cast<std::size_t>(yy) * shape.width + xx];
    }
    d[t] = step.self * d[t] + step.gain * acc;
  }
}

void etf_refine(const EtfPass& pass) {
  const auto offsets = disk(pass.radius);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < pass.shape.height; ++y)
    for (int x = 0; x < pass.shape.width; ++x) etf_pixel(pass, offsets, y, x);
}

}  // namespace omp

}  // namespace gist::kernels
