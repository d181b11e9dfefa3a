#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gist/image.hpp"

namespace gist {

enum class TransformKind { dwt, swt, contourlet };

std::string to_string(TransformKind kind);
TransformKind parse_transform_kind(const std::string& name);

// One scale of a decomposition. Wavelet stacks carry three details ordered
// (v, h, d); contourlet stacks carry K_l directional details.
struct SubbandStack {
  int scale = 0;
  Tensor approx;  // empty when the representation does not keep it
  std::vector<Tensor> details;

  bool has_approx() const { return !approx.empty(); }
  std::size_t subband_count() const { return details.size() + 1; }
  // Subband k: 0 is the approximation, 1..K the details.
  const Tensor& subband(std::size_t k) const { return k == 0 ? approx : details[k - 1]; }
  Tensor& subband(std::size_t k) { return k == 0 ? approx : details[k - 1]; }
};

struct TransformSpec {
  TransformKind kind = TransformKind::swt;
  std::string wavelet = "db2";
  int levels = 3;
  std::vector<int> directions{1, 4, 4};  // contourlet only; entry l-1 applies to scale l
};

struct MultiscaleRep {
  TransformSpec spec;
  std::vector<SubbandStack> stacks;  // stacks[l - 1] is scale l, finest first

  int levels() const { return static_cast<int>(stacks.size()); }
  std::size_t coefficient_count() const;
};

// Per-scale analysis/synthesis pair (Phi^-1, Phi) plus the bookkeeping needed to
// follow a label map through the decomposition.
class MultiscaleTransform {
 public:
  virtual ~MultiscaleTransform() = default;

  virtual const TransformSpec& spec() const = 0;
  int levels() const { return spec().levels; }

  // Throws ArgumentError when an image of this size cannot be decomposed.
  virtual void check_dims(int height, int width) const = 0;

  virtual SubbandStack analyze_level(const Tensor& approx, int level) const = 0;
  virtual Tensor synthesize_level(const SubbandStack& stack, int level) const = 0;

  // Given the labels aligned with the approximation of scale `level - 1` (the
  // image itself for level 1), returns the labels aligned with each subband of
  // `level`, approximation first.
  virtual std::vector<LabelMap> level_masks(const LabelMap& parent, int level) const = 0;

  // With keep_all_approx the approximation of every scale is retained.
  MultiscaleRep analyze(const Tensor& img, bool keep_all_approx = false) const;
  Tensor synthesize(const MultiscaleRep& rep) const;
};

std::unique_ptr<MultiscaleTransform> make_transform(const TransformSpec& spec);

MultiscaleRep analyze(const Tensor& img, const TransformSpec& spec);
Tensor synthesize(const MultiscaleRep& rep);

// Writes every subband of `rep` as a min-max normalized PNG into `dir`.
void dump_subbands(const MultiscaleRep& rep, const std::string& dir, const std::string& prefix);

}  // namespace gist
