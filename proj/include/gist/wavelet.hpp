#pragma once

#include <string>
#include <vector>

#include "gist/multiscale.hpp"

namespace gist {

// Orthonormal two-channel filter bank. Analysis is periodic correlation with
// h0/h1; synthesis filters are the time reversals g0/g1, so synthesis is the
// adjoint of analysis.
struct WaveletSpec {
  std::string family;
  std::vector<double> h0;
  std::vector<double> h1;
  std::vector<double> g0;
  std::vector<double> g1;
  bool decimated = true;
  int levels = 1;
};

// Supported families: "haar", "db2".
WaveletSpec make_filters(const std::string& family);

SubbandStack dwt_analyze_level(const Tensor& approx, const WaveletSpec& spec);
Tensor dwt_synthesize_level(const SubbandStack& stack, const WaveletSpec& spec);

// Undecimated (a trous) level: filters dilated by 2^(level-1).
SubbandStack swt_analyze_level(const Tensor& approx, const WaveletSpec& spec, int level);
Tensor swt_synthesize_level(const SubbandStack& stack, const WaveletSpec& spec, int level);

class WaveletTransform final : public MultiscaleTransform {
 public:
  explicit WaveletTransform(const TransformSpec& spec);

  const TransformSpec& spec() const override { return spec_; }
  const WaveletSpec& filters() const { return filters_; }

  void check_dims(int height, int width) const override;
  SubbandStack analyze_level(const Tensor& approx, int level) const override;
  Tensor synthesize_level(const SubbandStack& stack, int level) const override;
  std::vector<LabelMap> level_masks(const LabelMap& parent, int level) const override;

 private:
  TransformSpec spec_;
  WaveletSpec filters_;
};

}  // namespace gist
