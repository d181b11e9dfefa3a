#pragma once

#include <cstdint>
#include <vector>

#include "gist/multiscale.hpp"

namespace gist {

struct ContourletSpec {
  int levels = 3;
  std::vector<int> directions{1, 4, 4};  // K_l per scale, finest first; each a power of two
  std::vector<double> pyramid_lowpass;   // odd-length symmetric, DC gain sqrt(2) per axis
  std::vector<double> pyramid_interp;    // odd-length symmetric, each polyphase sums to 1/sqrt(2)
  std::vector<double> ladder;            // half of the symmetric even-length ladder filter
};

// 9/7 pyramid filters and the 12-tap PKVA ladder filter.
ContourletSpec make_contourlet_spec(int levels, std::vector<int> directions);

struct PyramidLevel {
  Tensor coarse;
  Tensor bandpass;
};

PyramidLevel lp_analyze(const Tensor& img, const ContourletSpec& spec);
Tensor lp_synthesize(const Tensor& coarse, const Tensor& bandpass, const ContourletSpec& spec);

// Critically sampled directional filter bank: a binary tree of two-channel
// quincunx fan filter banks, each realized as a two-step ladder (lifting)
// network and hence invertible for any ladder filter. Returns 2^k_levels
// subbands of size (H / 2^floor(k/2)) x (W / 2^ceil(k/2)).
std::vector<Tensor> dfb_analyze(const Tensor& bandpass, int k_levels, const ContourletSpec& spec);
Tensor dfb_synthesize(const std::vector<Tensor>& subbands, int k_levels,
                      const ContourletSpec& spec);

// Flat full-resolution positions (row-major) of every DFB subband sample, in
// the order the samples are packed.
std::vector<std::vector<std::int32_t>> dfb_positions(int height, int width, int k_levels);

class ContourletTransform final : public MultiscaleTransform {
 public:
  explicit ContourletTransform(const TransformSpec& spec);
  explicit ContourletTransform(ContourletSpec filters);

  const TransformSpec& spec() const override { return spec_; }
  const ContourletSpec& filters() const { return filters_; }

  void check_dims(int height, int width) const override;
  SubbandStack analyze_level(const Tensor& approx, int level) const override;
  Tensor synthesize_level(const SubbandStack& stack, int level) const override;
  std::vector<LabelMap> level_masks(const LabelMap& parent, int level) const override;

 private:
  int tree_depth(int level) const;

  TransformSpec spec_;
  ContourletSpec filters_;
};

MultiscaleRep contourlet_analyze(const Tensor& img, const ContourletSpec& spec);
Tensor contourlet_synthesize(const MultiscaleRep& rep, const ContourletSpec& spec);

}  // namespace gist
