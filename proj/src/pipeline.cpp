#include "gist/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "gist/errors.hpp"
#include "gist/log.hpp"

namespace gist {

namespace {

// Style statistics of one subband: global plus one entry per label present.
struct BandTarget {
  ChannelStats global;
  std::map<std::uint32_t, ChannelStats> by_label;
};

using LevelMasks = std::vector<LabelMap>;  // approximation first

std::string dims(const Tensor& t) {
  return std::to_string(t.width()) + "x" + std::to_string(t.height());
}

void check_mask_dims(const RegionMask& m, const Tensor& img, const char* what) {
  if (m.width != img.width() || m.height != img.height()) {
    throw ArgumentError(std::string(what) + " mask is " + std::to_string(m.width) + "x" +
                        std::to_string(m.height) + " but its image is " + dims(img));
  }
}

void check_style_dims(const MultiscaleTransform& t, const Tensor& style) {
  try {
    t.check_dims(style.height(), style.width());
  } catch (const ArgumentError& e) {
    throw ArgumentError("style image " + dims(style) + " is too small or badly sized for " +
                        std::to_string(t.levels()) + " scales: " + e.what());
  }
}

bool has_shared_label(const RegionMask& a, const RegionMask& b) {
  const auto la = a.distinct();
  const auto lb = b.distinct();
  return std::any_of(la.begin(), la.end(),
                     [&](std::uint32_t l) { return std::binary_search(lb.begin(), lb.end(), l); });
}

class Engine {
 public:
  Engine(const Tensor& content, const std::vector<Tensor>& styles, const StyleJobConfig& cfg)
      : content_(content), styles_(styles), cfg_(cfg), transform_(make_transform(cfg.transform)) {}

  Tensor run() {
    transform_->check_dims(content_.height(), content_.width());
    for (const Tensor& s : styles_) {
      if (s.channels() != content_.channels()) {
        throw ArgumentError("content has " + std::to_string(content_.channels()) +
                            " channels, style has " + std::to_string(s.channels()));
      }
    }
    prepare_masks();
    prepare_targets();
    prepare_etf();

    const int levels = transform_->levels();
    MultiscaleRep fc = transform_->analyze(content_);
    if (!cfg_.dump_dir.empty()) dump_subbands(fc, cfg_.dump_dir, "content");

    Tensor approx = std::move(fc.stacks.back().approx);
    for (int l = levels; l >= 1; --l) {
      SubbandStack before;
      before.scale = l;
      before.approx = std::move(approx);
      before.details = std::move(fc.stacks[l - 1].details);

      SubbandStack after = before;
      align_band(after, 0, l);
      for (std::size_t k = 1; k < after.subband_count(); ++k) {
        if (cfg_.mode == StyleMode::artistic) {
          after.subband(k) = fuse_details(before.subband(k), etf_rep_.stacks[l - 1].details[k - 1]);
        } else if (cfg_.align_details) {
          align_band(after, k, l);
        }
      }
      if (cfg_.observer) cfg_.observer({l, &before, &after});
      if (!cfg_.dump_dir.empty()) dump_level(after, l);
      approx = transform_->synthesize_level(after, l);
    }
    return approx;
  }

 private:
  bool blending() const { return cfg_.blend.has_value(); }
  bool masked() const { return content_masks_.size() > 0; }

  void prepare_masks() {
    if (!cfg_.content_mask && !cfg_.style_mask) return;
    if (!cfg_.content_mask || !cfg_.style_mask) {
      throw ArgumentError("masked stylization needs both a content and a style mask");
    }
    check_mask_dims(*cfg_.content_mask, content_, "content");
    check_mask_dims(*cfg_.style_mask, styles_.front(), "style");
    if (!has_shared_label(*cfg_.content_mask, *cfg_.style_mask)) {
      log::warn("content and style masks share no label; stylizing globally");
      return;
    }
    content_masks_ = follow_masks(*cfg_.content_mask);
    style_masks_ = follow_masks(*cfg_.style_mask);
  }

  std::vector<LevelMasks> follow_masks(const RegionMask& mask) const {
    std::vector<LevelMasks> out;
    const LabelMap* parent = &mask;
    for (int l = 1; l <= transform_->levels(); ++l) {
      out.push_back(transform_->level_masks(*parent, l));
      parent = &out.back().front();
    }
    return out;
  }

  void prepare_targets() {
    if (blending()) {
      cfg_.blend->validate(styles_.size());
      for (const Tensor& s : styles_) {
        const Tensor resized = (s.width() == content_.width() && s.height() == content_.height())
                                   ? s
                                   : resize_bilinear(s, content_.width(), content_.height());
        style_reps_.push_back(transform_->analyze(resized, true));
      }
      return;
    }
    if (styles_.size() != 1) {
      throw ArgumentError("stylization without blend weights takes exactly one style, got " +
                          std::to_string(styles_.size()));
    }
    const Tensor& style = styles_.front();
    check_style_dims(*transform_, style);
    targets_.resize(transform_->levels());
    Tensor approx = style;
    for (int l = 1; l <= transform_->levels(); ++l) {
      SubbandStack st = transform_->analyze_level(approx, l);
      for (std::size_t k = 0; k < st.subband_count(); ++k) {
        BandTarget t;
        t.global = compute_stats(st.subband(k));
        if (masked()) {
          const LabelMap& m = style_masks_[l - 1][k];
          for (std::uint32_t label : m.distinct()) t.by_label.emplace(label, compute_stats(st.subband(k), {&m, label}));
        }
        targets_[l - 1].push_back(std::move(t));
      }
      approx = std::move(st.approx);
    }
  }

  void prepare_etf() {
    if (cfg_.mode != StyleMode::artistic) return;
    const Tensor gray = style_etf_image(styles_.front(), content_.width(), content_.height(),
                                        cfg_.seed, cfg_.etf);
    if (!cfg_.dump_dir.empty()) {
      std::filesystem::create_directories(cfg_.dump_dir);
      save_image(gray, cfg_.dump_dir + "/etf.png");
    }
    etf_rep_ = transform_->analyze(gray);
  }

  void align_band(SubbandStack& stack, std::size_t k, int level) const {
    Tensor& band = stack.subband(k);
    if (blending()) {
      Tensor target = cfg_.blend->lambda0 * Tensor(band);
      for (std::size_t r = 0; r < style_reps_.size(); ++r) {
        target += cfg_.blend->lambdas[r] * Tensor(style_reps_[r].stacks[level - 1].subband(k));
      }
      apply_map_inplace(band, optimal_map(compute_stats(band), compute_stats(target), cfg_.eps));
      return;
    }
    const BandTarget& target = targets_[level - 1][k];
    if (!masked()) {
      apply_map_inplace(band, optimal_map(compute_stats(band), target.global, cfg_.eps));
      return;
    }
    const LabelMap& m = content_masks_[level - 1][k];
    // Maps are built from the unmodified band, then applied per region.
    const Tensor source = band;
    for (std::uint32_t label : m.distinct()) {
      const MaskSelection sel{&m, label};
      const auto it = target.by_label.find(label);
      const ChannelStats* style = &target.global;
      if (it != target.by_label.end()) {
        style = &it->second;
      } else {
        log::debug("label " + std::to_string(label) + " missing from style at scale " +
                   std::to_string(level) + "; using global style statistics");
      }
      apply_map_inplace(band, optimal_map(compute_stats(source, sel), *style, cfg_.eps), &sel);
    }
  }

  void dump_level(const SubbandStack& stack, int level) const {
    MultiscaleRep rep;
    rep.spec = cfg_.transform;
    SubbandStack s = stack;
    s.scale = level;
    rep.stacks.push_back(std::move(s));
    dump_subbands(rep, cfg_.dump_dir, "aligned");
  }

  const Tensor& content_;
  const std::vector<Tensor>& styles_;
  StyleJobConfig cfg_;
  std::unique_ptr<MultiscaleTransform> transform_;
  std::vector<LevelMasks> content_masks_;
  std::vector<LevelMasks> style_masks_;
  std::vector<std::vector<BandTarget>> targets_;  // [level - 1][subband]
  std::vector<MultiscaleRep> style_reps_;
  MultiscaleRep etf_rep_;
};

}  // namespace

std::string to_string(StyleMode mode) { return mode == StyleMode::photo ? "photo" : "artistic"; }

StyleMode parse_style_mode(const std::string& name) {
  if (name == "photo") return StyleMode::photo;
  if (name == "artistic") return StyleMode::artistic;
  throw ArgumentError("unknown mode '" + name + "' (expected photo or artistic)");
}

void BlendWeights::validate(std::size_t style_count) const {
  if (lambdas.size() != style_count) {
    throw ArgumentError("got " + std::to_string(lambdas.size()) + " style weights for " +
                        std::to_string(style_count) + " styles");
  }
  double sum = lambda0;
  auto in_range = [](double v) { return v >= 0.0 && v <= 1.0; };
  bool ok = in_range(lambda0);
  for (double v : lambdas) {
    ok = ok && in_range(v);
    sum += v;
  }
  if (!ok) throw ArgumentError("blend weights must lie in [0, 1]");
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ArgumentError("blend weights must sum to 1, got " + std::to_string(sum));
  }
}

void StyleJobConfig::validate() const {
  if (transform.levels < 1) throw ArgumentError("levels must be >= 1");
  if (!(eps >= 0.0)) throw ArgumentError("eps must be >= 0");
  if (blend && (content_mask || style_mask)) {
    throw ArgumentError("blend weights cannot be combined with region masks");
  }
  if (etf.radius < 1) throw ArgumentError("edge flow radius must be >= 1");
  if (etf.iterations < 1) throw ArgumentError("edge flow iterations must be >= 1");
}

Tensor run_style_job(const Tensor& content, const std::vector<Tensor>& styles,
                     const StyleJobConfig& cfg) {
  cfg.validate();
  if (styles.empty()) throw ArgumentError("at least one style image is required");
  return Engine(content, styles, cfg).run();
}

Tensor stylize(const Tensor& content, const Tensor& style, const StyleJobConfig& cfg) {
  return run_style_job(content, {style}, cfg);
}

Tensor stylize_interpolated(const Tensor& content, const std::vector<Tensor>& styles,
                            const StyleJobConfig& cfg) {
  if (!cfg.blend) throw ArgumentError("style interpolation needs blend weights");
  return run_style_job(content, styles, cfg);
}

Tensor stylize_masked(const Tensor& content, const Tensor& style, const RegionMask& content_mask,
                      const RegionMask& style_mask, const StyleJobConfig& cfg) {
  StyleJobConfig c = cfg;
  c.content_mask = content_mask;
  c.style_mask = style_mask;
  return run_style_job(content, {style}, c);
}

Tensor artistic_stylize(const Tensor& content, const Tensor& style, const StyleJobConfig& cfg) {
  StyleJobConfig c = cfg;
  c.mode = StyleMode::artistic;
  return run_style_job(content, {style}, c);
}

}  // namespace gist
