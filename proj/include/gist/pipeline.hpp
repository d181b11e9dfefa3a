#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gist/etf.hpp"
#include "gist/image.hpp"
#include "gist/multiscale.hpp"
#include "gist/transport.hpp"

namespace gist {

enum class StyleMode { photo, artistic };

std::string to_string(StyleMode mode);
StyleMode parse_style_mode(const std::string& name);

// Convex weights: lambda0 for the stylized content, lambdas[r] for style r.
struct BlendWeights {
  double lambda0 = 0.0;
  std::vector<double> lambdas;

  // Throws ArgumentError unless all weights lie in [0, 1], sum to 1 and there
  // is one weight per style.
  void validate(std::size_t style_count) const;
};

// What the coarse-to-fine loop saw and produced at one scale.
struct LevelTrace {
  int level = 0;
  const SubbandStack* before = nullptr;  // stylized approximation plus content details
  const SubbandStack* after = nullptr;   // aligned (and fused) stack handed to synthesis
};

using LevelObserver = std::function<void(const LevelTrace&)>;

struct StyleJobConfig {
  TransformSpec transform;
  double eps = kDefaultEps;
  StyleMode mode = StyleMode::photo;
  std::optional<BlendWeights> blend;
  std::optional<RegionMask> content_mask;
  std::optional<RegionMask> style_mask;
  std::uint64_t seed = 0;
  EtfParams etf;
  // Transport the detail subbands too, not only the approximation.
  bool align_details = true;
  // When set, subbands, the edge flow image and per-scale results are written here.
  std::string dump_dir;
  LevelObserver observer;

  void validate() const;
};

// Coarse-to-fine stylization. Honors masks and artistic mode from cfg; a
// blend in cfg routes to stylize_interpolated.
Tensor stylize(const Tensor& content, const Tensor& style, const StyleJobConfig& cfg);

// Styles are resized to the content size; cfg.blend is required.
Tensor stylize_interpolated(const Tensor& content, const std::vector<Tensor>& styles,
                            const StyleJobConfig& cfg);

// Transport restricted to regions sharing a label. Labels missing from the
// style use the global style statistics.
Tensor stylize_masked(const Tensor& content, const Tensor& style, const RegionMask& content_mask,
                      const RegionMask& style_mask, const StyleJobConfig& cfg);

// Approximations transported, details fused with the style's edge flow.
Tensor artistic_stylize(const Tensor& content, const Tensor& style, const StyleJobConfig& cfg);

// General entry point used by the command line.
Tensor run_style_job(const Tensor& content, const std::vector<Tensor>& styles,
                     const StyleJobConfig& cfg);

}  // namespace gist
