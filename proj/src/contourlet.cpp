#include "gist/contourlet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <string>

#include "gist/errors.hpp"
#include "gist/kernels.hpp"

namespace gist {

namespace {

using kernels::Axis;
using kernels::PlaneShape;

int log2_exact(int k) {
  if (k < 1 || (k & (k - 1)) != 0) {
    throw ArgumentError("direction counts must be powers of two, got " + std::to_string(k));
  }
  int d = 0;
  while ((1 << d) < k) ++d;
  return d;
}

struct LatticeVec {
  long y = 0;
  long x = 0;
};

LatticeVec operator+(LatticeVec a, LatticeVec b) { return {a.y + b.y, a.x + b.x}; }
LatticeVec operator-(LatticeVec a, LatticeVec b) { return {a.y - b.y, a.x - b.x}; }
LatticeVec operator*(long s, LatticeVec a) { return {s * a.y, s * a.x}; }

// True when d is an integer combination of c1 and c2.
bool in_lattice(LatticeVec d, LatticeVec c1, LatticeVec c2) {
  const long det = c1.y * c2.x - c2.y * c1.x;
  const long s = c2.x * d.y - c2.y * d.x;
  const long t = c1.y * d.x - c1.x * d.y;
  return s % det == 0 && t % det == 0;
}

// One two-channel split of every node at a given tree depth.
struct LadderStage {
  std::vector<std::int32_t> coset0;
  std::vector<std::int32_t> coset1;
  std::vector<int> offset_y;
  std::vector<int> offset_x;
  std::vector<double> weights;
};

// Each tree node is a coset o + span(b1, b2) of the full-resolution torus. A
// split keeps o + span(b1 + b2, b2 - b1) as channel 0 and its translate by b1
// as channel 1. The ladder filter acts separably along the child basis and is
// modulated along b1, which turns the diamond split into a fan split.
struct DfbPlan {
  PlaneShape shape;
  int depth = 0;
  int sub_height = 0;
  int sub_width = 0;
  std::vector<LadderStage> stages;
  std::vector<std::vector<std::int32_t>> positions;
};

DfbPlan make_plan(int height, int width, int depth, const std::vector<double>& ladder) {
  DfbPlan plan;
  plan.shape = {height, width};
  plan.depth = depth;
  plan.sub_height = height >> (depth / 2);
  plan.sub_width = width >> ((depth + 1) / 2);

  const std::size_t n = plan.shape.size();
  std::vector<std::uint32_t> node(n, 0);
  std::vector<LatticeVec> origin{{0, 0}};
  LatticeVec b1{0, 1};
  LatticeVec b2{1, 0};
  const int half = static_cast<int>(ladder.size());

  for (int j = 0; j < depth; ++j) {
    const LatticeVec c1 = b1 + b2;
    const LatticeVec c2 = b2 - b1;
    LadderStage st;
    std::vector<LatticeVec> next_origin(origin.size() * 2);
    for (std::size_t i = 0; i < origin.size(); ++i) {
      next_origin[2 * i] = origin[i];
      next_origin[2 * i + 1] = origin[i] + b1;
    }
    for (std::size_t p = 0; p < n; ++p) {
      const LatticeVec pos{static_cast<long>(p / width), static_cast<long>(p % width)};
      const bool first = in_lattice(pos - origin[node[p]], c1, c2);
      (first ? st.coset0 : st.coset1).push_back(static_cast<std::int32_t>(p));
      node[p] = 2 * node[p] + (first ? 0 : 1);
    }
    // Half-integer taps h = i + 1/2, i in [-half, half).
    for (int i1 = -half; i1 < half; ++i1) {
      for (int i2 = -half; i2 < half; ++i2) {
        const long a = i1 - i2;
        const long b = i1 + i2 + 1;
        const LatticeVec off = a * b1 + b * b2;
        const double f1 = ladder[static_cast<std::size_t>(i1 >= 0 ? i1 : -i1 - 1)];
        const double f2 = ladder[static_cast<std::size_t>(i2 >= 0 ? i2 : -i2 - 1)];
        const double sign = (a % 2 == 0) ? 1.0 : -1.0;
        st.offset_y.push_back(static_cast<int>(off.y));
        st.offset_x.push_back(static_cast<int>(off.x));
        st.weights.push_back(sign * f1 * f2);
      }
    }
    plan.stages.push_back(std::move(st));
    origin = std::move(next_origin);
    b1 = c1;
    b2 = c2;
  }

  plan.positions.assign(std::size_t{1} << depth, {});
  for (std::size_t p = 0; p < n; ++p) plan.positions[node[p]].push_back(static_cast<std::int32_t>(p));
  const std::size_t expected = static_cast<std::size_t>(plan.sub_height) * plan.sub_width;
  for (const auto& pos : plan.positions) {
    if (pos.size() != expected) throw StructureError("directional lattice does not tile the plane");
  }
  return plan;
}

void check_dfb_dims(int height, int width, int k_levels) {
  if (k_levels < 1) throw ArgumentError("DFB needs at least one tree level");
  const int period = 1 << k_levels;
  if (height % period != 0 || width % period != 0) {
    throw ArgumentError("DFB with " + std::to_string(k_levels) +
                        " levels needs dimensions divisible by " + std::to_string(period) + ", got " +
                        std::to_string(width) + "x" + std::to_string(height));
  }
}

void ladder_forward(std::span<double> data, const DfbPlan& plan) {
  const double r2 = std::sqrt(2.0);
  for (const LadderStage& st : plan.stages) {
    kernels::omp::lift(data, plan.shape,
                       {st.coset0, st.offset_y, st.offset_x, st.weights, 1.0 / r2, -1.0 / r2});
    kernels::omp::lift(data, plan.shape,
                       {st.coset1, st.offset_y, st.offset_x, st.weights, -r2, -1.0});
  }
}

void ladder_inverse(std::span<double> data, const DfbPlan& plan) {
  const double r2 = std::sqrt(2.0);
  for (auto it = plan.stages.rbegin(); it != plan.stages.rend(); ++it) {
    const LadderStage& st = *it;
    kernels::omp::lift(data, plan.shape,
                       {st.coset1, st.offset_y, st.offset_x, st.weights, -1.0 / r2, -1.0 / r2});
    kernels::omp::lift(data, plan.shape,
                       {st.coset0, st.offset_y, st.offset_x, st.weights, r2, 1.0});
  }
}

std::vector<double> normalized_lowpass(std::vector<double> h) {
  const double s = std::accumulate(h.begin(), h.end(), 0.0);
  for (double& v : h) v *= std::sqrt(2.0) / s;
  return h;
}

// Scales each polyphase component to sum to 1/sqrt(2), so zero-insertion
// followed by filtering along both axes reproduces a constant exactly.
std::vector<double> normalized_interp(std::vector<double> g) {
  for (std::size_t phase = 0; phase < 2; ++phase) {
    double s = 0.0;
    for (std::size_t k = phase; k < g.size(); k += 2) s += g[k];
    for (std::size_t k = phase; k < g.size(); k += 2) g[k] *= (1.0 / std::sqrt(2.0)) / s;
  }
  return g;
}

}  // namespace

ContourletSpec make_contourlet_spec(int levels, std::vector<int> directions) {
  if (levels < 1) throw ArgumentError("contourlet levels must be >= 1");
  if (static_cast<int>(directions.size()) != levels) {
    throw ArgumentError("contourlet needs one direction count per scale (" +
                        std::to_string(levels) + "), got " + std::to_string(directions.size()));
  }
  for (int k : directions) log2_exact(k);
  ContourletSpec spec;
  spec.levels = levels;
  spec.directions = std::move(directions);
  spec.pyramid_lowpass = normalized_lowpass({0.037828455506995, -0.023849465019380, -0.11062440441842,
                                             0.37740285561265, 0.85269867900940, 0.37740285561265,
                                             -0.11062440441842, -0.023849465019380,
                                             0.037828455506995});
  spec.pyramid_interp =
      normalized_interp({-0.064538882628938, -0.040689417609558, 0.41809227322221, 0.78848561640566,
                         0.41809227322221, -0.040689417609558, -0.064538882628938});
  spec.ladder = {0.6300, -0.1930, 0.0972, -0.0526, 0.0272, -0.0144};
  return spec;
}

PyramidLevel lp_analyze(const Tensor& img, const ContourletSpec& spec) {
  if (img.height() % 2 != 0 || img.width() % 2 != 0) {
    throw ArgumentError("Laplacian pyramid needs even dimensions, got " +
                        std::to_string(img.width()) + "x" + std::to_string(img.height()));
  }
  const int lo_off = -static_cast<int>(spec.pyramid_lowpass.size() / 2);
  const PlaneShape full{img.height(), img.width()};
  const PlaneShape half_x{img.height(), img.width() / 2};
  PyramidLevel out;
  out.coarse = Tensor(img.channels(), img.height() / 2, img.width() / 2);
  std::vector<double> tmp(half_x.size());
  for (int c = 0; c < img.channels(); ++c) {
    kernels::omp::correlate(img.plane(c), full, {spec.pyramid_lowpass, 2, 1, Axis::x, lo_off}, tmp);
    kernels::omp::correlate(tmp, half_x, {spec.pyramid_lowpass, 2, 1, Axis::y, lo_off},
                            out.coarse.plane(c));
  }
  Tensor pred = lp_synthesize(out.coarse, Tensor(img.channels(), img.height(), img.width()), spec);
  out.bandpass = img;
  auto b = out.bandpass.values();
  auto p = pred.values();
  for (std::size_t i = 0; i < b.size(); ++i) b[i] -= p[i];
  return out;
}

Tensor lp_synthesize(const Tensor& coarse, const Tensor& bandpass, const ContourletSpec& spec) {
  if (bandpass.channels() != coarse.channels() || bandpass.height() != 2 * coarse.height() ||
      bandpass.width() != 2 * coarse.width()) {
    throw ArgumentError("Laplacian bandpass must be twice the coarse dimensions");
  }
  const int up_off = -static_cast<int>(spec.pyramid_interp.size() / 2);
  const PlaneShape full{bandpass.height(), bandpass.width()};
  const PlaneShape half_x{bandpass.height(), coarse.width()};
  Tensor out = bandpass;
  std::vector<double> tmp(half_x.size());
  for (int c = 0; c < coarse.channels(); ++c) {
    std::fill(tmp.begin(), tmp.end(), 0.0);
    kernels::omp::correlate_adjoint_add(coarse.plane(c), half_x,
                                        {spec.pyramid_interp, 2, 1, Axis::y, up_off}, 1.0, tmp);
    kernels::omp::correlate_adjoint_add(tmp, full, {spec.pyramid_interp, 2, 1, Axis::x, up_off},
                                        1.0, out.plane(c));
  }
  return out;
}

std::vector<std::vector<std::int32_t>> dfb_positions(int height, int width, int k_levels) {
  check_dfb_dims(height, width, k_levels);
  return make_plan(height, width, k_levels, {1.0}).positions;
}

std::vector<Tensor> dfb_analyze(const Tensor& bandpass, int k_levels, const ContourletSpec& spec) {
  check_dfb_dims(bandpass.height(), bandpass.width(), k_levels);
  const DfbPlan plan = make_plan(bandpass.height(), bandpass.width(), k_levels, spec.ladder);
  std::vector<Tensor> out;
  for (std::size_t s = 0; s < plan.positions.size(); ++s) {
    out.emplace_back(bandpass.channels(), plan.sub_height, plan.sub_width);
  }
  std::vector<double> work(plan.shape.size());
  for (int c = 0; c < bandpass.channels(); ++c) {
    auto src = bandpass.plane(c);
    std::copy(src.begin(), src.end(), work.begin());
    ladder_forward(work, plan);
    for (std::size_t s = 0; s < plan.positions.size(); ++s) {
      auto dst = out[s].plane(c);
      const auto& pos = plan.positions[s];
      for (std::size_t i = 0; i < pos.size(); ++i) dst[i] = work[pos[i]];
    }
  }
  return out;
}

Tensor dfb_synthesize(const std::vector<Tensor>& subbands, int k_levels,
                      const ContourletSpec& spec) {
  if (k_levels < 1 || subbands.size() != (std::size_t{1} << k_levels)) {
    throw StructureError("DFB synthesis expects " + std::to_string(1 << std::max(k_levels, 0)) +
                         " subbands, got " + std::to_string(subbands.size()));
  }
  for (const Tensor& s : subbands) {
    if (!s.same_shape(subbands.front())) throw StructureError("DFB subbands differ in shape");
  }
  const int height = subbands.front().height() << (k_levels / 2);
  const int width = subbands.front().width() << ((k_levels + 1) / 2);
  check_dfb_dims(height, width, k_levels);
  const DfbPlan plan = make_plan(height, width, k_levels, spec.ladder);
  Tensor out(subbands.front().channels(), height, width);
  for (int c = 0; c < out.channels(); ++c) {
    auto work = out.plane(c);
    for (std::size_t s = 0; s < plan.positions.size(); ++s) {
      auto src = subbands[s].plane(c);
      const auto& pos = plan.positions[s];
      for (std::size_t i = 0; i < pos.size(); ++i) work[pos[i]] = src[i];
    }
    ladder_inverse(work, plan);
  }
  return out;
}

ContourletTransform::ContourletTransform(const TransformSpec& spec)
    : spec_(spec), filters_(make_contourlet_spec(spec.levels, spec.directions)) {
  if (spec.kind != TransformKind::contourlet) {
    throw ArgumentError("ContourletTransform needs a contourlet spec");
  }
}

ContourletTransform::ContourletTransform(ContourletSpec filters) : filters_(std::move(filters)) {
  if (filters_.levels < 1 || static_cast<int>(filters_.directions.size()) != filters_.levels) {
    throw ArgumentError("contourlet needs one direction count per scale");
  }
  for (int k : filters_.directions) log2_exact(k);
  spec_.kind = TransformKind::contourlet;
  spec_.levels = filters_.levels;
  spec_.directions = filters_.directions;
}

int ContourletTransform::tree_depth(int level) const {
  return log2_exact(filters_.directions.at(static_cast<std::size_t>(level - 1)));
}

void ContourletTransform::check_dims(int height, int width) const {
  long factor = 1;
  for (int l = 1; l <= filters_.levels; ++l) {
    const long need = (1L << (l - 1)) * std::max(2L, 1L << tree_depth(l));
    factor = std::max(factor, need);
  }
  if (height % factor != 0 || width % factor != 0) {
    throw ArgumentError("contourlet configuration needs dimensions divisible by " +
                        std::to_string(factor) + ", got " + std::to_string(width) + "x" +
                        std::to_string(height));
  }
}

SubbandStack ContourletTransform::analyze_level(const Tensor& approx, int level) const {
  PyramidLevel lp = lp_analyze(approx, filters_);
  SubbandStack s;
  s.scale = level;
  s.approx = std::move(lp.coarse);
  const int depth = tree_depth(level);
  if (depth == 0) {
    s.details.push_back(std::move(lp.bandpass));
  } else {
    s.details = dfb_analyze(lp.bandpass, depth, filters_);
  }
  return s;
}

Tensor ContourletTransform::synthesize_level(const SubbandStack& stack, int level) const {
  if (!stack.has_approx()) throw StructureError("contourlet synthesis needs the approximation");
  const int depth = tree_depth(level);
  if (stack.details.size() != (std::size_t{1} << depth)) {
    throw StructureError("contourlet scale " + std::to_string(level) + " expects " +
                         std::to_string(1 << depth) + " directional subbands");
  }
  if (depth == 0) return lp_synthesize(stack.approx, stack.details.front(), filters_);
  return lp_synthesize(stack.approx, dfb_synthesize(stack.details, depth, filters_), filters_);
}

std::vector<LabelMap> ContourletTransform::level_masks(const LabelMap& parent, int level) const {
  std::vector<LabelMap> out{downsample_nearest(parent, 2)};
  const int depth = tree_depth(level);
  if (depth == 0) {
    out.push_back(parent);
    return out;
  }
  const auto positions = dfb_positions(parent.height, parent.width, depth);
  const int sub_h = parent.height >> (depth / 2);
  const int sub_w = parent.width >> ((depth + 1) / 2);
  for (const auto& pos : positions) {
    LabelMap m(sub_w, sub_h);
    for (std::size_t i = 0; i < pos.size(); ++i) m.labels[i] = parent.labels[pos[i]];
    out.push_back(std::move(m));
  }
  return out;
}

MultiscaleRep contourlet_analyze(const Tensor& img, const ContourletSpec& spec) {
  return ContourletTransform(spec).analyze(img);
}

Tensor contourlet_synthesize(const MultiscaleRep& rep, const ContourletSpec& spec) {
  return ContourletTransform(spec).synthesize(rep);
}

}  // namespace gist
