#include "gist/multiscale.hpp"

#include <filesystem>

#include "gist/contourlet.hpp"
#include "gist/errors.hpp"
#include "gist/wavelet.hpp"

namespace gist {

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::dwt:
      return "dwt";
    case TransformKind::swt:
      return "swt";
    case TransformKind::contourlet:
      return "contourlet";
  }
  return "unknown";
}

TransformKind parse_transform_kind(const std::string& name) {
  if (name == "dwt") return TransformKind::dwt;
  if (name == "swt") return TransformKind::swt;
  if (name == "contourlet") return TransformKind::contourlet;
  throw ArgumentError("unknown transform '" + name + "' (expected dwt, swt or contourlet)");
}

std::size_t MultiscaleRep::coefficient_count() const {
  std::size_t n = 0;
  for (const SubbandStack& s : stacks) {
    if (s.has_approx()) n += s.approx.size();
    for (const Tensor& d : s.details) n += d.size();
  }
  return n;
}

MultiscaleRep MultiscaleTransform::analyze(const Tensor& img, bool keep_all_approx) const {
  check_dims(img.height(), img.width());
  MultiscaleRep rep;
  rep.spec = spec();
  const int levels = spec().levels;
  rep.stacks.reserve(levels);
  const Tensor* approx = &img;
  for (int l = 1; l <= levels; ++l) {
    rep.stacks.push_back(analyze_level(*approx, l));
    approx = &rep.stacks.back().approx;
    if (!keep_all_approx && l > 1) rep.stacks[l - 2].approx = Tensor();
  }
  return rep;
}

Tensor MultiscaleTransform::synthesize(const MultiscaleRep& rep) const {
  if (rep.levels() != spec().levels) {
    throw StructureError("representation has " + std::to_string(rep.levels()) +
                         " scales, transform expects " + std::to_string(spec().levels));
  }
  if (rep.stacks.empty() || !rep.stacks.back().has_approx()) {
    throw StructureError("representation is missing its coarsest approximation");
  }
  Tensor approx = rep.stacks.back().approx;
  for (int l = rep.levels(); l >= 1; --l) {
    SubbandStack s;
    s.scale = l;
    s.approx = std::move(approx);
    s.details = rep.stacks[l - 1].details;
    approx = synthesize_level(s, l);
  }
  return approx;
}

std::unique_ptr<MultiscaleTransform> make_transform(const TransformSpec& spec) {
  if (spec.kind == TransformKind::contourlet) return std::make_unique<ContourletTransform>(spec);
  return std::make_unique<WaveletTransform>(spec);
}

MultiscaleRep analyze(const Tensor& img, const TransformSpec& spec) {
  return make_transform(spec)->analyze(img);
}

Tensor synthesize(const MultiscaleRep& rep) { return make_transform(rep.spec)->synthesize(rep); }

void dump_subbands(const MultiscaleRep& rep, const std::string& dir, const std::string& prefix) {
  std::filesystem::create_directories(dir);
  for (const SubbandStack& s : rep.stacks) {
    const std::string base = dir + "/" + prefix + "_l" + std::to_string(s.scale);
    if (s.has_approx()) save_normalized(s.approx, base + "_a.png");
    for (std::size_t k = 0; k < s.details.size(); ++k) {
      save_normalized(s.details[k], base + "_d" + std::to_string(k + 1) + ".png");
    }
  }
}

}  // namespace gist
